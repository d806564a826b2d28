use super::report::RobustnessReport;
use crate::sim::SimConfig;

/// `[min, max]` of s1..s4 and l1..l4 over every reachable state.
///
/// At the default configuration these are `[0, 1210]` twice, `[0, 575]`
/// twice, `[-650, 560]`, `[-360, 850]`, `[-17, 15]` and `[-24, 5]`.
pub fn component_ranges(config: &SimConfig) -> [(f64, f64); 8] {
    let x_max = config.x_max();
    let y_max = config.y_max();
    [
        (0.0, x_max),
        (0.0, x_max),
        (0.0, y_max),
        (0.0, y_max),
        (-config.pad_x_min, x_max - config.pad_x_min),
        (config.pad_x_max - x_max, config.pad_x_max),
        (config.speed_limit - config.max_speed, config.speed_limit),
        (config.angle_limit - config.max_angle, config.angle_limit),
    ]
}

/// Mean of the eight components, each scaled to `[0, 1]` by its range,
/// as a percentage rounded half up.
pub fn overall_score(report: &RobustnessReport, config: &SimConfig) -> u8 {
    let values = report
        .safety_parts()
        .into_iter()
        .chain(report.landing_parts());
    let total: f64 = values
        .zip(component_ranges(config))
        .map(|(v, (lo, hi))| ((v - lo) / (hi - lo)).clamp(0.0, 1.0))
        .sum();
    let pct = 100.0 * total / 8.0;
    libm::floor(pct + 0.5).clamp(0.0, 100.0) as u8
}
