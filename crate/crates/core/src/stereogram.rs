//! Stereographic projection onto the equatorial plane.
//!
//! Northern points (`z >= 0`, equator included) are projected from the south
//! pole and drawn as filled markers; southern points are projected from the
//! north pole and drawn as open markers. Meridians project to lines through
//! the origin and parallels to circles centred at the origin.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::sphere::{Design, SpherePoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Hemisphere {
    North,
    South,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjectedMarker {
    pub u: f64,
    pub v: f64,
    pub hemisphere: Hemisphere,
}

pub fn project(p: &SpherePoint) -> ProjectedMarker {
    let [x, y, z] = p.xyz();
    if z >= 0.0 {
        ProjectedMarker { u: x / (1.0 + z), v: y / (1.0 + z), hemisphere: Hemisphere::North }
    } else {
        ProjectedMarker { u: x / (1.0 - z), v: y / (1.0 - z), hemisphere: Hemisphere::South }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StereogramStyle {
    pub size: u32,
    pub marker_radius: f64,
    pub meridians: u32,
    pub parallels: u32,
    pub grid: bool,
    pub boundary: bool,
}

impl Default for StereogramStyle {
    fn default() -> Self {
        Self { size: 512, marker_radius: 6.0, meridians: 12, parallels: 5, grid: false, boundary: true }
    }
}

/// Half-width of the plotted square in plane units.
const EXTENT: f64 = 1.05;
/// Open markers that sit on a filled one are drawn this much larger.
const RING_SCALE: f64 = 1.7;
const COINCIDENT: f64 = 1e-9;

struct Canvas {
    size: f64,
}

impl Canvas {
    fn x(&self, u: f64) -> f64 {
        (u + EXTENT) / (2.0 * EXTENT) * self.size
    }

    fn y(&self, v: f64) -> f64 {
        (EXTENT - v) / (2.0 * EXTENT) * self.size
    }

    fn len(&self, r: f64) -> f64 {
        r / (2.0 * EXTENT) * self.size
    }
}

/// Renders an SVG 1.1 stereogram. Output depends only on the inputs.
pub fn render(design: &Design, style: &StereogramStyle) -> String {
    let canvas = Canvas { size: style.size.max(1) as f64 };
    let size = style.size.max(1);
    let c = canvas.x(0.0);
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#
    );
    if let Some(label) = design.label() {
        let _ = writeln!(s, "<title>{}</title>", escape(label));
    }
    let _ = writeln!(s, r#"<rect width="{size}" height="{size}" fill="white"/>"#);
    if style.grid {
        let _ = writeln!(s, r##"<g class="grid" stroke="#999999" stroke-width="0.75" fill="none">"##);
        for k in 0..style.meridians {
            let phi = std::f64::consts::PI * k as f64 / style.meridians.max(1) as f64;
            let (sp, cp) = phi.sin_cos();
            let _ = writeln!(
                s,
                r#"<line class="meridian" x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}"/>"#,
                canvas.x(-cp),
                canvas.y(-sp),
                canvas.x(cp),
                canvas.y(sp)
            );
        }
        for k in 1..=style.parallels {
            // polar angle θ projects to radius tan(θ/2)
            let theta = std::f64::consts::FRAC_PI_2 * k as f64 / (style.parallels + 1) as f64;
            let r = (theta / 2.0).tan();
            let _ = writeln!(
                s,
                r#"<circle class="parallel" cx="{c:.3}" cy="{c:.3}" r="{:.3}"/>"#,
                canvas.len(r)
            );
        }
        let _ = writeln!(s, "</g>");
    }
    if style.boundary {
        let _ = writeln!(
            s,
            r#"<circle class="boundary" cx="{c:.3}" cy="{c:.3}" r="{:.3}" fill="none" stroke="black" stroke-width="1.5"/>"#,
            canvas.len(1.0)
        );
    }
    let markers: Vec<ProjectedMarker> = design.points().iter().map(project).collect();
    let north: Vec<&ProjectedMarker> = markers.iter().filter(|m| m.hemisphere == Hemisphere::North).collect();
    let south: Vec<&ProjectedMarker> = markers.iter().filter(|m| m.hemisphere == Hemisphere::South).collect();
    let r = style.marker_radius;
    // open markers first so filled dots sit on top of any ring
    for m in &south {
        let ring = north.iter().any(|n| (n.u - m.u).abs() < COINCIDENT && (n.v - m.v).abs() < COINCIDENT);
        let rr = if ring { r * RING_SCALE } else { r };
        let _ = writeln!(
            s,
            r#"<circle class="south" cx="{:.3}" cy="{:.3}" r="{rr:.3}" fill="white" stroke="black" stroke-width="1.5"/>"#,
            canvas.x(m.u),
            canvas.y(m.v)
        );
    }
    for m in &north {
        let _ = writeln!(
            s,
            r#"<circle class="north" cx="{:.3}" cy="{:.3}" r="{r:.3}" fill="black"/>"#,
            canvas.x(m.u),
            canvas.y(m.v)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
