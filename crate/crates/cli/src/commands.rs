use anyhow::{Context, Result};
use fpaut_core::dynamics::classify_orbit;
use fpaut_core::graph_map::default_gate_depth;
use fpaut_core::mapping_torus::{conjugacy_pipeline, ConjugacyOutcome, PipelineOptions};
use fpaut_core::{
    atoroidal_search, build_standard_map, check_train_track, constants_report, flare_certify, gate_structure,
    mapping_torus_abelianization, parse_word, pf_growth_rate, read_automorphism, render_word, twin_search,
    Automorphism, AutomorphismFile, EnumerationBounds, Word,
};
use num_rational::BigRational;
use serde_json::{json, Value};

use crate::{parse_lambda, Command, Input, JobConfig};

const DEFAULT_LEN: usize = 3;
const DEFAULT_POWER: usize = 3;

/// A validated job with its inputs parsed.
pub(crate) struct Job<'a> {
    cfg: &'a JobConfig,
    phi: Automorphism,
    phi2: Option<Automorphism>,
    element: Option<Word>,
    lambda: BigRational,
    depth: usize,
}

impl<'a> Job<'a> {
    pub fn load(cfg: &'a JobConfig, aut: &Input, aut2: Option<&Input>) -> Result<Self> {
        let phi = read_automorphism(&aut.text).context("--aut")?;
        let phi2 = aut2.map(|a| read_automorphism(&a.text).context("--aut2")).transpose()?;
        let element = cfg
            .element
            .as_deref()
            .map(|e| parse_word(e, phi.presentation()).context("--element"))
            .transpose()?;
        Ok(Job {
            cfg,
            lambda: parse_lambda(&cfg.bounds.lambda_min)?,
            depth: cfg.bounds.depth.unwrap_or_else(|| default_gate_depth(phi.presentation())),
            phi,
            phi2,
            element,
        })
    }

    fn enumeration(&self) -> EnumerationBounds {
        let b = &self.cfg.bounds;
        let l = b.max_len.unwrap_or(DEFAULT_LEN);
        EnumerationBounds::new(l, b.max_mass.unwrap_or(l))
    }

    fn power_bound(&self) -> usize {
        self.cfg.bounds.max_exp.unwrap_or(DEFAULT_POWER)
    }

    fn pipeline_options(&self) -> PipelineOptions {
        let d = PipelineOptions::default();
        let b = &self.cfg.bounds;
        PipelineOptions {
            conj_len: b.max_len.unwrap_or(d.conj_len),
            substitution_bound: b.max_exp.map_or(d.substitution_bound, |e| e as i64),
            ..d
        }
    }

    /// The bounds that affect this command's result, with defaults resolved.
    pub fn bounds_json(&self) -> Value {
        let b = &self.cfg.bounds;
        let e = self.enumeration();
        let search = json!({
            "max_len": e.max_syllables,
            "max_mass": e.max_mass,
            "max_exp": self.power_bound(),
            "limit": e.limit,
        });
        match self.cfg.command {
            Command::Classify => json!({ "max_iter": b.max_iter }),
            Command::Atoroidal | Command::Twins => search,
            Command::Flare => {
                let mut v = search;
                v["min_len"] = json!(b.min_len);
                v["lambda_min"] = json!(self.lambda.to_string());
                v
            }
            Command::Traintrack | Command::Constants => json!({ "depth": self.depth }),
            Command::TorusAb => json!({}),
            Command::Conjugacy => {
                let o = self.pipeline_options();
                json!({
                    "max_len": o.conj_len,
                    "max_exp": o.substitution_bound,
                    "max_candidates": o.max_candidates,
                })
            }
        }
    }

    pub fn execute(&self) -> Result<Value> {
        let phi = &self.phi;
        let b = &self.cfg.bounds;
        let v = match self.cfg.command {
            Command::Classify => {
                let g = self.element.as_ref().expect("validated");
                let (orbit, growth) = classify_orbit(phi, g, b.max_iter)?;
                json!({ "element": render_word(g), "orbit": orbit, "growth": growth })
            }
            Command::Atoroidal => serde_json::to_value(atoroidal_search(phi, &self.enumeration(), self.power_bound())?)?,
            Command::Twins => serde_json::to_value(twin_search(phi, self.power_bound(), &self.enumeration())?)?,
            Command::Flare => serde_json::to_value(flare_certify(
                phi,
                b.min_len,
                &self.enumeration(),
                self.power_bound(),
                &self.lambda,
            )?)?,
            Command::Traintrack => {
                let m = build_standard_map(phi)?;
                let t = m.transition_matrix();
                let mut v = serde_json::to_value(check_train_track(&m, self.depth))?;
                v["gates"] = serde_json::to_value(gate_structure(&m, self.depth))?;
                v["growth"] = serde_json::to_value(pf_growth_rate(&t).ok())?;
                v["transition_matrix"] = serde_json::to_value(&t)?;
                v
            }
            Command::Constants => serde_json::to_value(constants_report(&build_standard_map(phi)?, self.depth, 1.0)?)?,
            Command::TorusAb => serde_json::to_value(mapping_torus_abelianization(phi))?,
            Command::Conjugacy => {
                let phi2 = self.phi2.as_ref().expect("validated");
                conjugacy_json(conjugacy_pipeline(phi, phi2, &self.pipeline_options())?)
            }
        };
        Ok(v)
    }
}

fn conjugacy_json(outcome: ConjugacyOutcome) -> Value {
    match outcome {
        ConjugacyOutcome::Conjugate { witness, warnings } => {
            let psi = AutomorphismFile::from_automorphism(&witness.psi);
            json!({
                "verdict": "conjugate",
                "psi": { "images": psi.images, "inverse_images": psi.inverse_images },
                "inner": render_word(&witness.inner),
                "warnings": warnings,
            })
        }
        ConjugacyOutcome::Distinguished {
            invariant,
            left,
            right,
            warnings,
        } => json!({
            "verdict": "distinguished",
            "invariant": invariant,
            "left": left,
            "right": right,
            "warnings": warnings,
        }),
        ConjugacyOutcome::Undecided {
            candidates_tried,
            warnings,
        } => json!({
            "verdict": "undecided",
            "candidates_tried": candidates_tried,
            "warnings": warnings,
        }),
    }
}
