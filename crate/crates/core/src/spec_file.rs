//! Model-spec files: one model per TOML document, tagged by `family`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::models::{Arc, FourierTerm, NormModel};
use crate::tangency::Ellipse;

/// Arc in start/heading/curvature/length form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArcSpec {
    pub start: [f64; 2],
    pub heading: f64,
    pub curvature: f64,
    pub length: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ModelSpec {
    /// `p = inf` selects ℓ∞.
    Lp { p: f64 },
    Polar { terms: Vec<FourierTerm> },
    QuadrantMix { p: f64, q: f64 },
    L2L1Hybrid,
    Polygon { vertices: Vec<[f64; 2]> },
    ArcChain { arcs: Vec<ArcSpec> },
    /// Fourth-quadrant arcs extended by reflection in both axes.
    Curve { quadrant: Vec<ArcSpec> },
    /// Each form is `[A, B, C]` for `Ax² + By² + Cxy ≤ 1`.
    EllipseIntersection { forms: Vec<[f64; 3]> },
    Blend { eps: f64, base: Box<ModelSpec> },
    Scaled { factor: f64, base: Box<ModelSpec> },
    Dual { base: Box<ModelSpec> },
    /// Recipe: the staircase-curvature model built at the given depth.
    Nobst { depth: u32 },
    /// Recipe: the two-circle splice with radius `r` and angle `angle` at `(0, r−1)`.
    Splicing { r: f64, angle: f64 },
}

impl ModelSpec {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    /// Builds and validates the model this spec describes.
    pub fn build(&self) -> Result<NormModel> {
        let model = match self {
            ModelSpec::Lp { p } => NormModel::lp(*p)?,
            ModelSpec::Polar { terms } => NormModel::polar(terms.clone())?,
            ModelSpec::QuadrantMix { p, q } => NormModel::quadrant_mix(*p, *q)?,
            ModelSpec::L2L1Hybrid => NormModel::l2_l1_hybrid()?,
            ModelSpec::Polygon { vertices } => {
                NormModel::polygon(vertices.iter().map(|v| Vec2::new(v[0], v[1])).collect())?
            }
            ModelSpec::ArcChain { arcs } => NormModel::arc_chain(arcs.iter().map(Arc::from_spec).collect())?,
            ModelSpec::Curve { quadrant } => NormModel::curve_norm(quadrant.iter().map(Arc::from_spec).collect())?,
            ModelSpec::EllipseIntersection { forms } => {
                let ellipses = forms
                    .iter()
                    .map(|f| Ellipse::from_coeffs(f[0], f[1], f[2]))
                    .collect::<Result<Vec<_>>>()?;
                NormModel::ellipse_intersection(ellipses)?
            }
            ModelSpec::Blend { eps, base } => NormModel::blend(&base.build()?, *eps)?,
            ModelSpec::Scaled { factor, base } => NormModel::scaled(&base.build()?, *factor)?,
            ModelSpec::Dual { base } => NormModel::dual(&base.build()?)?,
            ModelSpec::Nobst { depth } => crate::curve_builder::build_nobst(*depth)?.model,
            ModelSpec::Splicing { r, angle } => crate::gallery::splicing(*r, *angle)?,
        };
        Ok(model.with_spec(self.clone()))
    }

    /// Short human-readable label.
    pub fn label(&self) -> String {
        match self {
            ModelSpec::Lp { p } if p.is_infinite() => "lp(inf)".into(),
            ModelSpec::Lp { p } => format!("lp({p})"),
            ModelSpec::Polar { terms } => {
                let parts: Vec<String> = terms
                    .iter()
                    .map(|t| match t.n {
                        0 => format!("{}", t.cos),
                        n => format!("{}cos{n}θ+{}sin{n}θ", t.cos, t.sin),
                    })
                    .collect();
                format!("polar({})", parts.join("+"))
            }
            ModelSpec::QuadrantMix { p, q } => format!("quadrant-mix({p},{q})"),
            ModelSpec::L2L1Hybrid => "l2-l1-hybrid".into(),
            ModelSpec::Polygon { vertices } => format!("polygon({} vertices)", vertices.len()),
            ModelSpec::ArcChain { arcs } => format!("arc-chain({} arcs)", arcs.len()),
            ModelSpec::Curve { quadrant } => format!("curve({} quadrant arcs)", quadrant.len()),
            ModelSpec::EllipseIntersection { forms } => format!("ellipse-intersection({})", forms.len()),
            ModelSpec::Blend { eps, base } => format!("blend({},{eps})", base.label()),
            ModelSpec::Scaled { factor, base } => format!("scaled({},{factor})", base.label()),
            ModelSpec::Dual { base } => format!("dual({})", base.label()),
            ModelSpec::Nobst { depth } => format!("nobst(depth={depth})"),
            ModelSpec::Splicing { r, angle } => format!("splicing(r={r},angle={angle})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lp_round_trip() {
        let spec = ModelSpec::Lp { p: 4.0 };
        let text = spec.to_toml_string().unwrap();
        assert!(text.contains("family = \"lp\""));
        assert_eq!(ModelSpec::from_toml_str(&text).unwrap(), spec);
    }

    #[test]
    fn infinity_is_spelled_inf() {
        let spec = ModelSpec::from_toml_str("family = \"lp\"\np = inf\n").unwrap();
        assert_eq!(spec, ModelSpec::Lp { p: f64::INFINITY });
        let m = spec.build().unwrap();
        assert!(m.is_polyhedral());
    }

    #[test]
    fn nested_blend() {
        let text = "family = \"blend\"\neps = 1.0\n[base]\nfamily = \"lp\"\np = 4.0\n";
        let spec = ModelSpec::from_toml_str(text).unwrap();
        let m = spec.build().unwrap();
        assert_eq!(m.spec(), &spec);
        let back = ModelSpec::from_toml_str(&spec.to_toml_string().unwrap()).unwrap();
        assert_eq!(back, spec);
    }

    #[test]
    fn polar_terms_default_missing_coefficients() {
        let text = "family = \"polar\"\nterms = [{ n = 0, cos = 1.0 }, { n = 4, sin = 0.05 }]\n";
        let spec = ModelSpec::from_toml_str(text).unwrap();
        spec.build().unwrap();
    }

    #[test]
    fn unknown_family_is_a_parse_error() {
        assert!(matches!(
            ModelSpec::from_toml_str("family = \"torus\"\n"),
            Err(Error::Parse(_))
        ));
    }
}
