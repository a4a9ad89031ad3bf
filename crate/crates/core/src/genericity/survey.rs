use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::certifier::{Certificate, CertificateClass, PreparedSet, RadiusOptions, UncertifiedReason};
use crate::convex::{ConvexSetDescription, DD_MAX_AMBIENT_DIM};
use crate::error::{Error, Result};
use crate::linalg::LinearMap;
use crate::rng::{derive_seed, gaussian_vec, stream};
use crate::tolerance::Tolerances;

const RECHECK_SALT: u64 = 0x5245_4348;
/// Perturbation size used to recheck class-B maps.
pub const B_RECHECK_RADIUS: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurveyConfig {
    pub m: usize,
    pub samples: usize,
    pub seed: u64,
    pub tolerances: Tolerances,
    /// Maps with index below this are rechecked under perturbation.
    pub recheck_count: usize,
    pub recheck_perturbations: usize,
    pub radius: RadiusOptions,
}

impl SurveyConfig {
    pub fn new(m: usize, samples: usize, seed: u64) -> Self {
        Self {
            m,
            samples,
            seed,
            tolerances: Tolerances::default(),
            recheck_count: 100,
            recheck_perturbations: 20,
            radius: RadiusOptions {
                starts: 64,
                oracle_samples: 10_000,
            },
        }
    }
}

/// One CSV row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurveyRow {
    pub sample_index: usize,
    pub certificate_class: CertificateClass,
    #[serde(serialize_with = "number_or_blank")]
    pub radius_or_delta: Option<f64>,
    #[serde(serialize_with = "bool_or_blank")]
    pub recheck_pass: Option<bool>,
    #[serde(skip)]
    pub rank_deficient: bool,
    #[serde(skip)]
    pub recheck_agreed: usize,
    #[serde(skip)]
    pub recheck_total: usize,
}

fn number_or_blank<S: serde::Serializer>(v: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(x) if x.is_finite() => s.serialize_str(&x.to_string()),
        Some(_) => s.serialize_str("inf"),
        None => s.serialize_str(""),
    }
}

fn bool_or_blank<S: serde::Serializer>(v: &Option<bool>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(b) => s.serialize_str(if *b { "true" } else { "false" }),
        None => s.serialize_str(""),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassFractions {
    #[serde(rename = "KernelTrivial")]
    pub kernel_trivial: f64,
    #[serde(rename = "RelIntKernel")]
    pub rel_int_kernel: f64,
    #[serde(rename = "Uncertified")]
    pub uncertified: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadiusStats {
    pub count: usize,
    pub min: Option<f64>,
    pub median: Option<f64>,
    pub max: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurveyReport {
    pub set: ConvexSetDescription,
    pub m: usize,
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    pub fractions: ClassFractions,
    pub rank_deficient_fraction: f64,
    /// Finite class-A radii.
    pub radius_stats: RadiusStats,
    pub rechecked_maps: usize,
    /// Share of recheck perturbations that kept their class.
    pub persistence_rate: Option<f64>,
    pub wall_time_seconds: f64,
    #[serde(skip)]
    pub rows: Vec<SurveyRow>,
}

impl SurveyReport {
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in &self.rows {
            w.serialize(row).map_err(|e| Error::Numerical(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Numerical(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    /// JSON summary; `wall_time_seconds` is the only nondeterministic field.
    pub fn summary_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// The `index`-th random map: iid standard normal entries from its own stream.
pub fn random_map(m: usize, n: usize, seed: u64, index: u64) -> LinearMap {
    let mut rng = stream(seed, index);
    LinearMap::from_raw(m, n, gaussian_vec(&mut rng, m * n))
}

pub fn survey(x: &ConvexSetDescription, config: &SurveyConfig) -> Result<SurveyReport> {
    let started = Instant::now();
    let n = x.ambient_dim();
    if config.samples == 0 {
        return Err(Error::InvalidInput("survey needs at least one sample".into()));
    }
    if n > DD_MAX_AMBIENT_DIM || config.m == 0 || config.m > n {
        return Err(Error::ScaleExceeded(format!(
            "survey needs 1 <= m <= n <= {DD_MAX_AMBIENT_DIM} (got m = {}, n = {n})",
            config.m
        )));
    }
    let prepared = PreparedSet::new(x)?
        .with_tolerances(config.tolerances)
        .with_radius_options(config.radius);
    let rows = (0..config.samples)
        .into_par_iter()
        .map(|i| survey_row(&prepared, config, n, i))
        .collect::<Result<Vec<SurveyRow>>>()?;

    let count = |c: CertificateClass| rows.iter().filter(|r| r.certificate_class == c).count();
    let total = config.samples as f64;
    let kt = count(CertificateClass::KernelTrivial);
    let ri = count(CertificateClass::RelIntKernel);
    let un = config.samples - kt - ri;
    let mut radii: Vec<f64> = rows
        .iter()
        .filter(|r| r.certificate_class == CertificateClass::KernelTrivial)
        .filter_map(|r| r.radius_or_delta)
        .filter(|r| r.is_finite())
        .collect();
    radii.sort_by(f64::total_cmp);
    let median = (!radii.is_empty()).then(|| {
        let k = radii.len();
        if k % 2 == 1 {
            radii[k / 2]
        } else {
            0.5 * (radii[k / 2 - 1] + radii[k / 2])
        }
    });
    let rechecked: Vec<&SurveyRow> = rows.iter().filter(|r| r.recheck_pass.is_some()).collect();
    let (agreed, tried) = rechecked
        .iter()
        .fold((0, 0), |(a, t), r| (a + r.recheck_agreed, t + r.recheck_total));
    Ok(SurveyReport {
        set: x.clone(),
        m: config.m,
        n,
        samples: config.samples,
        seed: config.seed,
        fractions: ClassFractions {
            kernel_trivial: kt as f64 / total,
            rel_int_kernel: ri as f64 / total,
            uncertified: un as f64 / total,
        },
        rank_deficient_fraction: rows.iter().filter(|r| r.rank_deficient).count() as f64 / total,
        radius_stats: RadiusStats {
            count: radii.len(),
            min: radii.first().copied(),
            median,
            max: radii.last().copied(),
        },
        rechecked_maps: rechecked.len(),
        persistence_rate: (tried > 0).then(|| agreed as f64 / tried as f64),
        wall_time_seconds: started.elapsed().as_secs_f64(),
        rows,
    })
}

fn survey_row(prepared: &PreparedSet, config: &SurveyConfig, n: usize, i: usize) -> Result<SurveyRow> {
    let t = random_map(config.m, n, config.seed, i as u64);
    let cert = prepared.classify(&t)?;
    let class = cert.class();
    let mut row = SurveyRow {
        sample_index: i,
        certificate_class: class,
        radius_or_delta: cert.radius_or_delta(),
        recheck_pass: None,
        rank_deficient: matches!(
            cert,
            Certificate::Uncertified {
                reason: UncertifiedReason::RankDeficientOnY,
                ..
            }
        ),
        recheck_agreed: 0,
        recheck_total: 0,
    };
    if i < config.recheck_count && class.is_certified() && config.recheck_perturbations > 0 {
        let r = match cert {
            Certificate::KernelTrivial { radius } if radius.is_finite() => 0.5 * radius,
            // unbounded radius: any perturbation size will do
            Certificate::KernelTrivial { .. } => 0.5 * t.operator_norm(),
            _ => B_RECHECK_RADIUS,
        };
        let seed = derive_seed(config.seed ^ RECHECK_SALT, i as u64);
        let rep = prepared.neighborhood_check(&t, r, config.recheck_perturbations, seed)?;
        row.recheck_agreed = rep.agreed;
        row.recheck_total = rep.samples;
        row.recheck_pass = Some(rep.agreed == rep.samples);
    }
    Ok(row)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convex::ConeRep;
    use crate::linalg::Vector;

    #[test]
    fn polytope_is_always_kernel_trivial() {
        let pts = vec![
            Vector::new(vec![0.0, 0.0, 0.0]).unwrap(),
            Vector::new(vec![1.0, 0.0, 2.0]).unwrap(),
        ];
        let x = ConvexSetDescription::polyhedron(pts, vec![]).unwrap();
        let mut cfg = SurveyConfig::new(2, 50, 4);
        cfg.recheck_count = 5;
        let rep = survey(&x, &cfg).unwrap();
        assert_eq!(rep.fractions.kernel_trivial, 1.0);
        assert_eq!(rep.rows.len(), 50);
        assert_eq!(rep.persistence_rate, Some(1.0));
    }

    #[test]
    fn csv_shape() {
        let x = ConvexSetDescription::cone(ConeRep::orthant(3));
        let mut cfg = SurveyConfig::new(2, 3, 1);
        cfg.recheck_count = 1;
        let csv = survey(&x, &cfg).unwrap().to_csv().unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "sample_index,certificate_class,radius_or_delta,recheck_pass");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("0,"));
    }

    #[test]
    fn scale_limits() {
        let x = ConvexSetDescription::cone(ConeRep::orthant(3));
        assert!(matches!(survey(&x, &SurveyConfig::new(4, 1, 0)), Err(Error::ScaleExceeded(_))));
        assert!(matches!(survey(&x, &SurveyConfig::new(2, 0, 0)), Err(Error::InvalidInput(_))));
    }
}
