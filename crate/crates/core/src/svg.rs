//! SVG figures of unit spheres with disc, ellipse and image overlays.
//!
//! The view box is `[−1.6, 1.6]²` with the y-axis flipped to the
//! mathematical orientation. Sphere black, inner discs green, outer discs
//! red, images of the sphere under linear maps blue.

use std::fmt::Write as _;

use crate::geometry::{LinearMap2, Vec2};
use crate::models::NormModel;
use crate::numeric::angle_grid;
use crate::tangency::{tangency_report, Ellipse};

const SPHERE_SAMPLES: usize = 1024;
const OVERLAY_POINTS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Overlay {
    None,
    Discs,
    Ellipses,
}

fn path(points: &[Vec2]) -> String {
    let mut d = String::new();
    for (i, p) in points.iter().enumerate() {
        let cmd = if i == 0 { 'M' } else { 'L' };
        let _ = write!(d, "{cmd}{:.6},{:.6} ", p.x1, p.x2);
    }
    d.push('Z');
    d
}

fn ellipse_points(e: &Ellipse) -> Vec<Vec2> {
    angle_grid(256).into_iter().map(|t| e.boundary(t)).collect()
}

/// Sphere points on a uniform angle grid; the polyline is closed by `Z`.
pub fn sphere_polyline(model: &NormModel) -> Vec<Vec2> {
    angle_grid(SPHERE_SAMPLES).into_iter().map(|t| model.radial_point(t)).collect()
}

/// SVG document for `model` with the requested overlay and blue images `T[S]`.
pub fn render(model: &NormModel, overlay: Overlay, images: &[LinearMap2]) -> String {
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"-1.6 -1.6 3.2 3.2\" width=\"640\" height=\"640\">\n",
    );
    let _ = writeln!(out, "  <title>{}</title>", escape(&model.name()));
    out.push_str("  <g transform=\"scale(1,-1)\" fill=\"none\" stroke-width=\"0.008\">\n");
    out.push_str("    <line x1=\"-1.6\" y1=\"0\" x2=\"1.6\" y2=\"0\" stroke=\"#bbbbbb\"/>\n");
    out.push_str("    <line x1=\"0\" y1=\"-1.6\" x2=\"0\" y2=\"1.6\" stroke=\"#bbbbbb\"/>\n");
    let sphere = sphere_polyline(model);
    let _ = writeln!(out, "    <path class=\"sphere\" stroke=\"black\" d=\"{}\"/>", path(&sphere));
    for t in images {
        let img: Vec<Vec2> = sphere.iter().map(|&p| t.apply(p)).collect();
        let _ = writeln!(out, "    <path class=\"image\" stroke=\"blue\" d=\"{}\"/>", path(&img));
    }
    if overlay != Overlay::None {
        for theta in angle_grid(OVERLAY_POINTS) {
            let r = tangency_report(model, &model.sphere_point(theta + 0.1));
            match overlay {
                Overlay::Discs => {
                    for (disc, color, class) in [(r.inner_disc, "green", "inner"), (r.outer_disc, "red", "outer")] {
                        if let Some(d) = disc {
                            let _ = writeln!(
                                out,
                                "    <circle class=\"{class}\" stroke=\"{color}\" cx=\"{:.6}\" cy=\"{:.6}\" r=\"{:.6}\"/>",
                                d.center.x1, d.center.x2, d.radius
                            );
                        }
                    }
                }
                Overlay::Ellipses => {
                    for (e, color, class) in [(r.inner_ellipse, "green", "inner"), (r.outer_ellipse, "red", "outer")] {
                        if let Some(e) = e {
                            let _ = writeln!(
                                out,
                                "    <path class=\"{class}\" stroke=\"{color}\" d=\"{}\"/>",
                                path(&ellipse_points(&e))
                            );
                        }
                    }
                }
                Overlay::None => {}
            }
        }
    }
    out.push_str("  </g>\n</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_closes_and_parses() {
        let m = NormModel::lp(4.0).unwrap();
        let pts = sphere_polyline(&m);
        let gap = (m.radial_point(std::f64::consts::TAU) - pts[0]).norm2();
        assert!(gap < 1e-9);
        let svg = render(&m, Overlay::Discs, &[LinearMap2::diag(1.0, 0.5)]);
        let doc = roxmltree::Document::parse(&svg).unwrap();
        assert_eq!(doc.root_element().tag_name().name(), "svg");
        assert!(svg.contains("stroke=\"blue\""));
        assert!(svg.contains("stroke=\"green\""));
    }

    #[test]
    fn ellipse_overlay_parses() {
        let svg = render(&NormModel::euclidean(), Overlay::Ellipses, &[]);
        roxmltree::Document::parse(&svg).unwrap();
        assert!(svg.contains("class=\"outer\""));
    }
}
