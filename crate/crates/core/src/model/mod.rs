//! Declarative PDE system specifications, their coefficients, and numerical
//! validation of the standing hypotheses.

mod coefficients;
mod hypotheses;

pub use coefficients::{Argument, CoefficientFn, ScalarReaction};
pub use hypotheses::{validate_hypotheses, HypothesisReport};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::domain::RadialDomain;
use crate::{Error, Result};

/// Which of the systems a [`SystemSpec`] describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemKind {
    Scalar,
    LotkaVolterra,
    CompetitiveGeneral,
    CooperativeGeneral,
    Cubic,
    PredatorPreyExploratory,
}

impl SystemKind {
    /// Systems whose coupling sign gives a cooperative linearization for the
    /// reflection differences (same-sign convention for both components).
    pub fn is_cooperative(&self) -> bool {
        matches!(self, SystemKind::CooperativeGeneral)
    }

    pub fn is_scalar(&self) -> bool {
        matches!(self, SystemKind::Scalar)
    }
}

/// Reaction terms per system kind.
#[derive(Clone, Debug, PartialEq)]
pub enum Reaction {
    /// `f(t, r, u)`; the second component is inert.
    Scalar { f: ScalarReaction },
    /// `a_i(t) u_i - b_i(t) u_i^2 -+ alpha_i(t) u_1 u_2`
    LotkaVolterra { a: [CoefficientFn; 2], b: [CoefficientFn; 2], alpha: [CoefficientFn; 2] },
    /// `f_i(t, r, u_i) - alpha_i(r, t) u_1 u_2`
    Competitive { f: [ScalarReaction; 2], alpha: [CoefficientFn; 2] },
    /// `f_i(t, r, u_i) + alpha_i(r, t) u_1 u_2`
    Cooperative { f: [ScalarReaction; 2], alpha: [CoefficientFn; 2] },
    /// `lambda_i u_i + gamma_i u_i^3 - alpha_i u_j^2 u_i`
    Cubic { lambda: [f64; 2], gamma: [f64; 2], alpha: [f64; 2] },
    /// `f_1 + alpha_1 u_1 u_2`, `f_2 - alpha_2 u_1 u_2` (mixed coupling sign)
    PredatorPrey { f: [ScalarReaction; 2], alpha: [CoefficientFn; 2] },
}

/// A full PDE system: kind, geometry, diffusion and reaction coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemSpec {
    kind: SystemKind,
    domain: RadialDomain,
    mu: [CoefficientFn; 2],
    reaction: Reaction,
}

impl SystemSpec {
    pub fn new(
        kind: SystemKind,
        domain: RadialDomain,
        mu: [CoefficientFn; 2],
        reaction: Reaction,
    ) -> Result<Self> {
        let arity_ok = matches!(
            (&kind, &reaction),
            (SystemKind::Scalar, Reaction::Scalar { .. })
                | (SystemKind::LotkaVolterra, Reaction::LotkaVolterra { .. })
                | (SystemKind::CompetitiveGeneral, Reaction::Competitive { .. })
                | (SystemKind::CooperativeGeneral, Reaction::Cooperative { .. })
                | (SystemKind::Cubic, Reaction::Cubic { .. })
                | (SystemKind::PredatorPreyExploratory, Reaction::PredatorPrey { .. })
        );
        if !arity_ok {
            return Err(Error::Spec(format!("reaction terms do not match kind {kind:?}")));
        }
        for m in &mu {
            m.validate()?;
        }
        match &reaction {
            Reaction::Scalar { f } => f.validate()?,
            Reaction::LotkaVolterra { a, b, alpha } => {
                for c in a.iter().chain(b).chain(alpha) {
                    c.validate()?;
                }
            }
            Reaction::Competitive { f, alpha }
            | Reaction::Cooperative { f, alpha }
            | Reaction::PredatorPrey { f, alpha } => {
                for g in f {
                    g.validate()?;
                }
                for c in alpha {
                    c.validate()?;
                }
            }
            Reaction::Cubic { lambda, gamma, alpha } => {
                if !lambda.iter().chain(gamma).chain(alpha).all(|v| v.is_finite()) {
                    return Err(Error::Spec("cubic constants must be finite".into()));
                }
            }
        }
        Ok(SystemSpec { kind, domain, mu, reaction })
    }

    pub fn kind(&self) -> SystemKind {
        self.kind
    }

    pub fn domain(&self) -> RadialDomain {
        self.domain
    }

    pub fn mu(&self, i: usize) -> &CoefficientFn {
        &self.mu[i]
    }

    pub fn reaction(&self) -> &Reaction {
        &self.reaction
    }

    /// Pointwise reaction terms `(g_1, g_2)` of the selected system.
    pub fn eval_reaction(&self, t: f64, r: f64, u1: f64, u2: f64) -> (f64, f64) {
        match &self.reaction {
            Reaction::Scalar { f } => (f.eval(r, t, u1), 0.0),
            Reaction::LotkaVolterra { a, b, alpha } => {
                let cross = u1 * u2;
                (
                    a[0].eval(r, t) * u1 - b[0].eval(r, t) * u1 * u1 - alpha[0].eval(r, t) * cross,
                    a[1].eval(r, t) * u2 - b[1].eval(r, t) * u2 * u2 - alpha[1].eval(r, t) * cross,
                )
            }
            Reaction::Competitive { f, alpha } => {
                let cross = u1 * u2;
                (
                    f[0].eval(r, t, u1) - alpha[0].eval(r, t) * cross,
                    f[1].eval(r, t, u2) - alpha[1].eval(r, t) * cross,
                )
            }
            Reaction::Cooperative { f, alpha } => {
                let cross = u1 * u2;
                (
                    f[0].eval(r, t, u1) + alpha[0].eval(r, t) * cross,
                    f[1].eval(r, t, u2) + alpha[1].eval(r, t) * cross,
                )
            }
            Reaction::Cubic { lambda, gamma, alpha } => (
                lambda[0] * u1 + gamma[0] * u1 * u1 * u1 - alpha[0] * u2 * u2 * u1,
                lambda[1] * u2 + gamma[1] * u2 * u2 * u2 - alpha[1] * u1 * u1 * u2,
            ),
            Reaction::PredatorPrey { f, alpha } => {
                let cross = u1 * u2;
                (
                    f[0].eval(r, t, u1) + alpha[0].eval(r, t) * cross,
                    f[1].eval(r, t, u2) - alpha[1].eval(r, t) * cross,
                )
            }
        }
    }

    /// Closed-form bounds of the competition/cooperation coupling, when the
    /// kind has one.
    pub fn alpha_bounds(&self) -> Option<(f64, f64)> {
        let pair = |alpha: &[CoefficientFn; 2]| {
            let (l0, h0) = alpha[0].bounds();
            let (l1, h1) = alpha[1].bounds();
            (l0.min(l1), h0.max(h1))
        };
        match &self.reaction {
            Reaction::Scalar { .. } => None,
            Reaction::LotkaVolterra { alpha, .. }
            | Reaction::Competitive { alpha, .. }
            | Reaction::Cooperative { alpha, .. }
            | Reaction::PredatorPrey { alpha, .. } => Some(pair(alpha)),
            Reaction::Cubic { alpha, .. } => {
                Some((alpha[0].min(alpha[1]), alpha[0].max(alpha[1])))
            }
        }
    }

    /// Closed-form diffusion bounds `(mu_*, mu^*)` over both components.
    pub fn mu_bounds(&self) -> (f64, f64) {
        let (l0, h0) = self.mu[0].bounds();
        let (l1, h1) = self.mu[1].bounds();
        (l0.min(l1), h0.max(h1))
    }

    pub fn reaction_depends_on_radius(&self) -> bool {
        match &self.reaction {
            Reaction::Scalar { f } => f.depends_on_radius(),
            Reaction::LotkaVolterra { a, b, alpha } => a
                .iter()
                .chain(b)
                .chain(alpha)
                .any(CoefficientFn::depends_on_radius),
            Reaction::Competitive { f, alpha }
            | Reaction::Cooperative { f, alpha }
            | Reaction::PredatorPrey { f, alpha } => {
                f.iter().any(ScalarReaction::depends_on_radius)
                    || alpha.iter().any(CoefficientFn::depends_on_radius)
            }
            Reaction::Cubic { .. } => false,
        }
    }

    /// Sampled Lipschitz bound of the reaction over the value box.
    ///
    /// The box is `[0, u_max]^2` for the (nonnegative) systems and
    /// `[-u_max, u_max]^2` for the scalar kind; finite differences are taken
    /// over a dense sample of the box, times and radii.
    pub fn lipschitz_bound(&self, u_max: f64) -> f64 {
        let u_max = u_max.max(1e-6);
        let lo = if self.kind.is_scalar() { -u_max } else { 0.0 };
        let nu = 33usize;
        let h = (u_max - lo) / (nu - 1) as f64;
        let us: Vec<f64> = (0..nu).map(|i| lo + i as f64 * h).collect();
        let times: Vec<f64> = (0..17).map(|i| i as f64 * 0.7).collect();
        let radii = {
            let (a1, a2) = (self.domain.inner_radius(), self.domain.outer_radius());
            (0..5).map(|i| a1 + (a2 - a1) * i as f64 / 4.0).collect::<Vec<f64>>()
        };
        let mut lip = 0.0_f64;
        for &t in &times {
            for &r in &radii {
                for iu in 0..nu {
                    for iv in 0..nu {
                        let (g1, g2) = self.eval_reaction(t, r, us[iu], us[iv]);
                        if iu + 1 < nu {
                            let (p1, p2) = self.eval_reaction(t, r, us[iu + 1], us[iv]);
                            lip = lip.max((p1 - g1).abs() / h).max((p2 - g2).abs() / h);
                        }
                        if iv + 1 < nu {
                            let (p1, p2) = self.eval_reaction(t, r, us[iu], us[iv + 1]);
                            lip = lip.max((p1 - g1).abs() / h).max((p2 - g2).abs() / h);
                        }
                    }
                }
            }
        }
        lip
    }

    /// Stability bound for the explicit reaction part: `0.5 / L`.
    pub fn dt_max(&self, u_max: f64) -> f64 {
        0.5 / self.lipschitz_bound(u_max).max(1e-12)
    }

    pub fn from_doc(doc: &SystemDoc) -> Result<SystemSpec> {
        doc.build()
    }

    pub fn to_doc(&self) -> SystemDoc {
        let mut coefficients = BTreeMap::new();
        let mut put = |name: &str, v: CoeffEntry| {
            coefficients.insert(name.to_string(), v);
        };
        put("mu1", CoeffEntry::Coefficient(self.mu[0].clone()));
        put("mu2", CoeffEntry::Coefficient(self.mu[1].clone()));
        match &self.reaction {
            Reaction::Scalar { f } => put("f1", CoeffEntry::Reaction(f.clone())),
            Reaction::LotkaVolterra { a, b, alpha } => {
                for (name, c) in [
                    ("a1", &a[0]),
                    ("a2", &a[1]),
                    ("b1", &b[0]),
                    ("b2", &b[1]),
                    ("alpha1", &alpha[0]),
                    ("alpha2", &alpha[1]),
                ] {
                    put(name, CoeffEntry::Coefficient(c.clone()));
                }
            }
            Reaction::Competitive { f, alpha }
            | Reaction::Cooperative { f, alpha }
            | Reaction::PredatorPrey { f, alpha } => {
                put("f1", CoeffEntry::Reaction(f[0].clone()));
                put("f2", CoeffEntry::Reaction(f[1].clone()));
                put("alpha1", CoeffEntry::Coefficient(alpha[0].clone()));
                put("alpha2", CoeffEntry::Coefficient(alpha[1].clone()));
            }
            Reaction::Cubic { lambda, gamma, alpha } => {
                for (name, v) in [
                    ("lambda1", lambda[0]),
                    ("lambda2", lambda[1]),
                    ("gamma1", gamma[0]),
                    ("gamma2", gamma[1]),
                    ("alpha1", alpha[0]),
                    ("alpha2", alpha[1]),
                ] {
                    put(name, CoeffEntry::Coefficient(CoefficientFn::constant(v)));
                }
            }
        }
        SystemDoc {
            kind: self.kind,
            domain: DomainDoc {
                a1: self.domain.inner_radius(),
                a2: self.domain.outer_radius(),
            },
            coefficients,
            initial: None,
        }
    }
}

/// JSON document form of a [`SystemSpec`]:
/// `{"kind", "domain": {"a1", "a2"}, "coefficients": {name: {...}}}`.
/// Unknown keys are rejected.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemDoc {
    pub kind: SystemKind,
    pub domain: DomainDoc,
    pub coefficients: BTreeMap<String, CoeffEntry>,
    /// Optional initial-data descriptor; interpreted by the scenario runner,
    /// carried opaquely here.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<serde_json::Value>,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainDoc {
    #[serde(default)]
    pub a1: f64,
    pub a2: f64,
}

/// A named entry of the coefficient map: either a coefficient function or a
/// scalar reaction descriptor (the `family` tags are disjoint).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoeffEntry {
    Coefficient(CoefficientFn),
    Reaction(ScalarReaction),
}

impl SystemDoc {
    pub fn build(&self) -> Result<SystemSpec> {
        let domain = RadialDomain::new(self.domain.a1, self.domain.a2)?;
        let mut used: std::collections::BTreeSet<String> = Default::default();
        let coeff = |name: &str, used: &mut std::collections::BTreeSet<String>| -> Result<CoefficientFn> {
            match self.coefficients.get(name) {
                Some(CoeffEntry::Coefficient(c)) => {
                    used.insert(name.to_string());
                    Ok(c.clone())
                }
                Some(CoeffEntry::Reaction(_)) => Err(Error::Spec(format!(
                    "coefficient '{name}' must be a coefficient function, not a reaction"
                ))),
                None => Err(Error::Spec(format!("missing coefficient '{name}'"))),
            }
        };
        let reaction_entry =
            |name: &str, used: &mut std::collections::BTreeSet<String>| -> Result<ScalarReaction> {
                match self.coefficients.get(name) {
                    Some(CoeffEntry::Reaction(f)) => {
                        used.insert(name.to_string());
                        Ok(f.clone())
                    }
                    Some(CoeffEntry::Coefficient(_)) => Err(Error::Spec(format!(
                        "coefficient '{name}' must be a reaction descriptor"
                    ))),
                    None => Err(Error::Spec(format!("missing reaction descriptor '{name}'"))),
                }
            };
        let constant = |name: &str, used: &mut std::collections::BTreeSet<String>| -> Result<f64> {
            match coeff(name, used)? {
                CoefficientFn::Constant { value } => Ok(value),
                _ => Err(Error::Spec(format!("coefficient '{name}' must be a constant"))),
            }
        };

        let mu = [coeff("mu1", &mut used)?, coeff("mu2", &mut used)?];
        let reaction = match self.kind {
            SystemKind::Scalar => Reaction::Scalar { f: reaction_entry("f1", &mut used)? },
            SystemKind::LotkaVolterra => Reaction::LotkaVolterra {
                a: [coeff("a1", &mut used)?, coeff("a2", &mut used)?],
                b: [coeff("b1", &mut used)?, coeff("b2", &mut used)?],
                alpha: [coeff("alpha1", &mut used)?, coeff("alpha2", &mut used)?],
            },
            SystemKind::CompetitiveGeneral => Reaction::Competitive {
                f: [reaction_entry("f1", &mut used)?, reaction_entry("f2", &mut used)?],
                alpha: [coeff("alpha1", &mut used)?, coeff("alpha2", &mut used)?],
            },
            SystemKind::CooperativeGeneral => Reaction::Cooperative {
                f: [reaction_entry("f1", &mut used)?, reaction_entry("f2", &mut used)?],
                alpha: [coeff("alpha1", &mut used)?, coeff("alpha2", &mut used)?],
            },
            SystemKind::Cubic => Reaction::Cubic {
                lambda: [constant("lambda1", &mut used)?, constant("lambda2", &mut used)?],
                gamma: [constant("gamma1", &mut used)?, constant("gamma2", &mut used)?],
                alpha: [constant("alpha1", &mut used)?, constant("alpha2", &mut used)?],
            },
            SystemKind::PredatorPreyExploratory => Reaction::PredatorPrey {
                f: [reaction_entry("f1", &mut used)?, reaction_entry("f2", &mut used)?],
                alpha: [coeff("alpha1", &mut used)?, coeff("alpha2", &mut used)?],
            },
        };
        for name in self.coefficients.keys() {
            if !used.contains(name) {
                return Err(Error::Spec(format!(
                    "coefficient '{name}' is not used by kind {:?}",
                    self.kind
                )));
            }
        }
        SystemSpec::new(self.kind, domain, mu, reaction)
    }
}

/// Convenience constructor for the constant-coefficient Lotka-Volterra
/// system used throughout the tests and scenarios.
pub fn lotka_volterra_constant(
    domain: RadialDomain,
    mu: [f64; 2],
    a: [f64; 2],
    b: [f64; 2],
    alpha: [f64; 2],
) -> Result<SystemSpec> {
    SystemSpec::new(
        SystemKind::LotkaVolterra,
        domain,
        [CoefficientFn::constant(mu[0]), CoefficientFn::constant(mu[1])],
        Reaction::LotkaVolterra {
            a: [CoefficientFn::constant(a[0]), CoefficientFn::constant(a[1])],
            b: [CoefficientFn::constant(b[0]), CoefficientFn::constant(b[1])],
            alpha: [CoefficientFn::constant(alpha[0]), CoefficientFn::constant(alpha[1])],
        },
    )
}

/// Convenience constructor for the scalar problem `u_t - mu Delta u = f`.
pub fn scalar_system(domain: RadialDomain, mu: f64, f: ScalarReaction) -> Result<SystemSpec> {
    SystemSpec::new(
        SystemKind::Scalar,
        domain,
        [CoefficientFn::constant(mu), CoefficientFn::constant(mu)],
        Reaction::Scalar { f },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_annulus() -> RadialDomain {
        RadialDomain::annulus(0.5, 1.0).unwrap()
    }

    #[test]
    fn lotka_volterra_symmetric_equilibrium() {
        let s =
            lotka_volterra_constant(unit_annulus(), [1.0, 1.0], [1.0, 1.0], [1.0, 1.0], [1.0, 1.0])
                .unwrap();
        let (g1, g2) = s.eval_reaction(0.0, 0.7, 0.5, 0.5);
        assert_eq!(g1, 0.0);
        assert_eq!(g2, 0.0);
    }

    #[test]
    fn reaction_vanishes_at_origin() {
        let s =
            lotka_volterra_constant(unit_annulus(), [1.0, 1.0], [1.0, 2.0], [0.5, 1.0], [1.0, 1.0])
                .unwrap();
        assert_eq!(s.eval_reaction(3.0, 0.6, 0.0, 0.0), (0.0, 0.0));
    }

    #[test]
    fn cubic_example() {
        let s = SystemSpec::new(
            SystemKind::Cubic,
            unit_annulus(),
            [CoefficientFn::constant(1.0), CoefficientFn::constant(1.0)],
            Reaction::Cubic { lambda: [1.0, 1.0], gamma: [0.0, 0.0], alpha: [1.0, 1.0] },
        )
        .unwrap();
        let (g1, _) = s.eval_reaction(0.0, 0.7, 1.0, 2.0);
        assert_eq!(g1, -3.0);
    }

    #[test]
    fn kind_reaction_mismatch_rejected() {
        let err = SystemSpec::new(
            SystemKind::Scalar,
            unit_annulus(),
            [CoefficientFn::constant(1.0), CoefficientFn::constant(1.0)],
            Reaction::Cubic { lambda: [1.0, 1.0], gamma: [0.0, 0.0], alpha: [1.0, 1.0] },
        );
        assert!(err.is_err());
    }

    #[test]
    fn doc_round_trip() {
        let s = lotka_volterra_constant(
            unit_annulus(),
            [1.0, 2.0],
            [1.0, 1.0],
            [1.0, 1.0],
            [0.8, 0.8],
        )
        .unwrap();
        let json = serde_json::to_string(&s.to_doc()).unwrap();
        let doc: SystemDoc = serde_json::from_str(&json).unwrap();
        assert_eq!(doc.build().unwrap(), s);
    }

    #[test]
    fn doc_rejects_unknown_and_missing_keys() {
        let json = r#"{
            "kind": "scalar",
            "domain": {"a1": 0.0, "a2": 1.0},
            "coefficients": {
                "mu1": {"family": "constant", "value": 1.0},
                "mu2": {"family": "constant", "value": 1.0},
                "f1": {"family": "zero"},
                "bogus": {"family": "constant", "value": 3.0}
            }
        }"#;
        let doc: SystemDoc = serde_json::from_str(json).unwrap();
        assert!(doc.build().is_err());

        let json = r#"{"kind": "scalar", "domain": {"a2": 1.0}, "coefficients": {}, "extra": 1}"#;
        assert!(serde_json::from_str::<SystemDoc>(json).is_err());
    }

    #[test]
    fn lipschitz_bound_linear_reaction() {
        // f = 2u has Lipschitz constant exactly 2 on any box.
        let s = scalar_system(
            RadialDomain::disk(1.0).unwrap(),
            1.0,
            ScalarReaction::Logistic {
                a: CoefficientFn::constant(2.0),
                b: CoefficientFn::constant(0.0),
            },
        )
        .unwrap();
        let lip = s.lipschitz_bound(1.0);
        assert!((lip - 2.0).abs() < 1e-9, "lip = {lip}");
        assert!((s.dt_max(1.0) - 0.25).abs() < 1e-9);
    }
}
