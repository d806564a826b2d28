use alloc::string::String;
use core::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::assessment::AnnotationPoint;
use crate::sim::{SimConfig, Trajectory};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ImageStyle {
    pub circle_radius: f64,
    pub path_color: String,
    pub circle_color: String,
}

impl Default for ImageStyle {
    fn default() -> Self {
        Self {
            circle_radius: 30.0,
            path_color: "#1f77b4".into(),
            circle_color: "#d62728".into(),
        }
    }
}

/// SVG drawing of a trajectory with its highlight circle.
///
/// `circle` is in window units (origin bottom-left) and sits at the centre of
/// the drone footprint at the annotated step. The document flips the y axis so
/// the floor and pad are drawn at the bottom. The path joins footprint centres.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotatedImage {
    pub svg: String,
    pub circle: AnnotationPoint,
    pub radius: f64,
}

pub fn render_trajectory_image(
    trajectory: &Trajectory,
    annotation: &AnnotationPoint,
    config: &SimConfig,
    style: &ImageStyle,
) -> AnnotatedImage {
    let w = config.window_width;
    let h = config.window_height;
    let (cx, cy) = (config.drone_width / 2.0, config.drone_height / 2.0);
    let flip = |y: f64| h - y;
    let mut svg = String::new();
    // Writing into a String cannot fail.
    let _ = write!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {w} {h}\" width=\"{w}\" height=\"{h}\">\n\
<rect class=\"frame\" x=\"0\" y=\"0\" width=\"{w}\" height=\"{h}\" fill=\"#ffffff\" stroke=\"#000000\" stroke-width=\"2\"/>\n\
<rect class=\"pad\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"6\" fill=\"#000000\"/>\n",
        config.pad_x_min,
        h - 6.0,
        config.pad_x_max - config.pad_x_min,
    );
    svg.push_str("<polyline class=\"trajectory\" fill=\"none\" stroke=\"");
    svg.push_str(&style.path_color);
    svg.push_str("\" stroke-width=\"2\" points=\"");
    for (i, s) in trajectory.samples.iter().enumerate() {
        if i > 0 {
            svg.push(' ');
        }
        let _ = write!(svg, "{:.2},{:.2}", s.x + cx, flip(s.y + cy));
    }
    svg.push_str("\"/>\n");
    if let Some(start) = trajectory.samples.first() {
        let _ = writeln!(
            svg,
            "<circle class=\"start\" cx=\"{:.2}\" cy=\"{:.2}\" r=\"6\" fill=\"#2ca02c\"/>",
            start.x + cx,
            flip(start.y + cy)
        );
    }
    let circle = AnnotationPoint {
        x: annotation.x + cx,
        y: annotation.y + cy,
        step_index: annotation.step_index,
    };
    let _ = write!(
        svg,
        "<circle class=\"highlight\" cx=\"{:.2}\" cy=\"{:.2}\" r=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"3\"/>\n</svg>\n",
        circle.x,
        flip(circle.y),
        style.circle_radius,
        style.circle_color,
    );
    AnnotatedImage {
        svg,
        circle,
        radius: style.circle_radius,
    }
}
