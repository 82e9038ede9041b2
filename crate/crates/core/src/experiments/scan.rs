use std::io::{Read, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, FamilySpec};
use crate::arithmetic::{frac_mul_add, CirclePoint, DiophantineProfile};
use crate::error::{Error, Result};
use crate::invariant::{analyze_functional_graph, birkhoff_measure, invariant_measure_of_diffeo};
use crate::maps::{
    attracting_cycle, attractor_repeller_family, discretize, periodic_orbit, CircleMapSpec,
};
use crate::measures::{wasserstein, AtomicMeasure, Lebesgue, MeasureRef, PushforwardLebesgue};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeasureKind {
    Physical,
    WorstCycle,
    BestCycle,
    Birkhoff,
}

impl MeasureKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MeasureKind::Physical => "physical",
            MeasureKind::WorstCycle => "worst-cycle",
            MeasureKind::BestCycle => "best-cycle",
            MeasureKind::Birkhoff => "birkhoff",
        }
    }
}

impl std::str::FromStr for MeasureKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "physical" => MeasureKind::Physical,
            "worst-cycle" => MeasureKind::WorstCycle,
            "best-cycle" => MeasureKind::BestCycle,
            "birkhoff" => MeasureKind::Birkhoff,
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "unknown measure kind {s:?}"
                )))
            }
        })
    }
}

/// One `(size, W)` sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingRecord {
    pub family_id: String,
    /// `delta_j` for convergent families, `1/N` for discretizations.
    pub size_param: f64,
    pub w_distance: f64,
    pub measure_kind: MeasureKind,
    pub seed: u64,
    /// The ladder entry that produced the record.
    #[serde(default)]
    pub param: f64,
    #[serde(default)]
    pub spec_hash: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanFailure {
    pub param: f64,
    pub error: String,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ScanReport {
    pub records: Vec<ScalingRecord>,
    pub failures: Vec<ScanFailure>,
}

/// Per-point RNG stream: depends only on the seed and the ladder value.
fn point_rng(seed: u64, param: f64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ param.to_bits().rotate_left(29))
}

fn family_tag(f: &FamilySpec) -> &'static str {
    match f {
        FamilySpec::AttractorRepeller { .. } => "attractor-repeller",
        FamilySpec::RationalSnap => "rational-snap",
        FamilySpec::Discretization { .. } => "discretization",
    }
}

fn extremes<'a, I: IntoIterator<Item = &'a f64>>(ws: I) -> (f64, f64) {
    ws.into_iter()
        .fold((f64::NEG_INFINITY, f64::INFINITY), |(hi, lo), &w| {
            (hi.max(w), lo.min(w))
        })
}

struct PointCtx<'a> {
    cfg: &'a ExperimentConfig,
    param: f64,
    size: f64,
    spec: &'a CircleMapSpec,
}

impl PointCtx<'_> {
    fn record(&self, kind: MeasureKind, w: f64) -> ScalingRecord {
        let hash = self.spec.spec_hash();
        ScalingRecord {
            family_id: format!("{}/{}/{}", family_tag(&self.cfg.family), self.param, hash),
            size_param: self.size,
            w_distance: w,
            measure_kind: kind,
            seed: self.cfg.seed,
            param: self.param,
            spec_hash: hash,
        }
    }
}

/// Evaluates one ladder entry of a convergent family.
fn convergent_point(
    cfg: &ExperimentConfig,
    profile: &DiophantineProfile,
    param: f64,
) -> Result<Vec<ScalingRecord>> {
    let j = param as usize;
    let conv = *profile.convergent(j)?;
    let mut rng = point_rng(cfg.seed, param);
    let x0: f64 = rng.random();
    let (p, q) = (conv.p, conv.q);
    let qf = q as f64;
    match &cfg.family {
        FamilySpec::AttractorRepeller { bump_strength } => {
            let spec = attractor_repeller_family(profile, j, *bump_strength)?;
            let ctx = PointCtx {
                cfg,
                param,
                size: conv.delta,
                spec: &spec,
            };
            // drift toward the attractor is about delta * s per step
            let rate = conv.delta * bump_strength;
            let burn = ((5.0 / rate).ceil() as u64).clamp(q, 200_000_000);
            let att = attracting_cycle(&spec, CirclePoint::wrap(x0), p, q, burn)?;
            let seed_rep = att.points[0].value() + 0.5 / qf;
            let rep = periodic_orbit(&spec, seed_rep, p, q)?;
            if rep.is_attracting() {
                return Err(Error::PeriodicOrbit("second orbit is not repelling".into()));
            }
            let w_att = wasserstein(&Lebesgue, &AtomicMeasure::uniform(&att.points)?)?;
            let w_rep = wasserstein(&Lebesgue, &AtomicMeasure::uniform(&rep.points)?)?;
            let (hi, lo) = extremes([w_att, w_rep].iter());
            let mut out = vec![
                ctx.record(MeasureKind::Physical, w_att),
                ctx.record(MeasureKind::WorstCycle, hi),
                ctx.record(MeasureKind::BestCycle, lo),
            ];
            if let Some(n) = cfg.orbit_len {
                let emp = birkhoff_measure(&spec, CirclePoint::wrap(x0), n, burn)?;
                out.push(ctx.record(MeasureKind::Birkhoff, wasserstein(&Lebesgue, &emp)?));
            }
            Ok(out)
        }
        FamilySpec::RationalSnap => {
            let spec = CircleMapSpec::rotation(p as f64 / qf);
            let ctx = PointCtx {
                cfg,
                param,
                size: conv.delta,
                spec: &spec,
            };
            // each orbit is {x + k p/q}; position k p / q mod 1 computed exactly
            let orbit = |x: f64| -> Vec<CirclePoint> {
                (0..q)
                    .map(|k| {
                        CirclePoint::wrap(x + ((k as u128 * p as u128) % q as u128) as f64 / qf)
                    })
                    .collect()
            };
            let w_x0 = wasserstein(&Lebesgue, &AtomicMeasure::uniform(&orbit(x0))?)?;
            let w_0 = wasserstein(&Lebesgue, &AtomicMeasure::uniform(&orbit(0.0))?)?;
            let (hi, lo) = extremes([w_x0, w_0].iter());
            let mut out = vec![
                ctx.record(MeasureKind::Physical, w_x0),
                ctx.record(MeasureKind::WorstCycle, hi),
                ctx.record(MeasureKind::BestCycle, lo),
            ];
            if let Some(n) = cfg.orbit_len {
                let pts: Vec<CirclePoint> = (1..=n)
                    .map(|k| CirclePoint::wrap(frac_mul_add(k, p as f64 / qf, x0)))
                    .collect();
                let emp = AtomicMeasure::uniform(&pts)?;
                out.push(ctx.record(MeasureKind::Birkhoff, wasserstein(&Lebesgue, &emp)?));
            }
            Ok(out)
        }
        FamilySpec::Discretization { .. } => unreachable!("handled by discretization_point"),
    }
}

fn discretization_point(
    cfg: &ExperimentConfig,
    alpha: f64,
    param: f64,
) -> Result<Vec<ScalingRecord>> {
    let FamilySpec::Discretization { map } = &cfg.family else {
        return Err(Error::Config("not a discretization family".into()));
    };
    let n = param as u64;
    let base = map.build(alpha);
    let spec = discretize(&base, n)?;
    let ctx = PointCtx {
        cfg,
        param,
        size: 1.0 / n as f64,
        spec: &spec,
    };
    let mu0: PushforwardLebesgue = invariant_measure_of_diffeo(&base)?;
    let reference: MeasureRef = match base {
        CircleMapSpec::Rotation { .. } => MeasureRef::Continuous(&Lebesgue),
        _ => MeasureRef::Continuous(&mu0),
    };
    let graph = analyze_functional_graph(&spec, n)?;
    let w_phys = wasserstein(reference, &graph.physical_measure())?;
    let per_cycle = (0..graph.cycles.len())
        .into_par_iter()
        .map(|k| wasserstein(reference, &graph.cycle_measure(k)))
        .collect::<Result<Vec<f64>>>()?;
    let (hi, lo) = extremes(per_cycle.iter());
    Ok(vec![
        ctx.record(MeasureKind::Physical, w_phys),
        ctx.record(MeasureKind::WorstCycle, hi),
        ctx.record(MeasureKind::BestCycle, lo),
    ])
}

/// Records for a single ladder entry; scans are the concatenation of these.
pub fn evaluate_point(cfg: &ExperimentConfig, param: f64) -> Result<Vec<ScalingRecord>> {
    evaluate_in(cfg, &ScanInput::new(cfg)?, param)
}

/// The arithmetic data a scan needs: discretizations only use `alpha`.
enum ScanInput {
    Alpha(f64),
    Profile(DiophantineProfile),
}

impl ScanInput {
    fn new(cfg: &ExperimentConfig) -> Result<Self> {
        Ok(match cfg.family {
            FamilySpec::Discretization { .. } => ScanInput::Alpha(cfg.alpha_value()?),
            _ => ScanInput::Profile(cfg.profile()?),
        })
    }
}

fn evaluate_in(
    cfg: &ExperimentConfig,
    input: &ScanInput,
    param: f64,
) -> Result<Vec<ScalingRecord>> {
    match input {
        ScanInput::Alpha(a) => discretization_point(cfg, *a, param),
        ScanInput::Profile(p) => convergent_point(cfg, p, param),
    }
}

fn run_scan(cfg: &ExperimentConfig) -> Result<ScanReport> {
    cfg.validate()?;
    let input = ScanInput::new(cfg)?;
    let results: Vec<(f64, Result<Vec<ScalingRecord>>)> = cfg
        .ladder
        .par_iter()
        .map(|&param| (param, evaluate_in(cfg, &input, param)))
        .collect();
    // par_iter preserves ladder order on collect
    let mut report = ScanReport::default();
    for (param, r) in results {
        match r {
            Ok(recs) => report.records.extend(recs),
            Err(e) => report.failures.push(ScanFailure {
                param,
                error: e.to_string(),
            }),
        }
    }
    Ok(report)
}

/// `||m - mu||_W` across a convergent-indexed ladder for the
/// attractor/repeller or rational-snap family.
pub fn stability_scan(cfg: &ExperimentConfig) -> Result<ScanReport> {
    if matches!(cfg.family, FamilySpec::Discretization { .. }) {
        return Err(Error::Config(
            "stability scans take AttractorRepeller or RationalSnap families".into(),
        ));
    }
    run_scan(cfg)
}

/// `W(mu_0, mu_N)` for the invariant measures of grid discretizations.
pub fn discretization_scan(cfg: &ExperimentConfig) -> Result<ScanReport> {
    if !matches!(cfg.family, FamilySpec::Discretization { .. }) {
        return Err(Error::Config(
            "discretization scans take a Discretization family".into(),
        ));
    }
    run_scan(cfg)
}

pub const CSV_HEADER: [&str; 5] = [
    "family_id",
    "size_param",
    "w_distance",
    "measure_kind",
    "seed",
];

/// Fixed-schema CSV with 17 significant digits.
pub fn write_records_csv<W: Write>(records: &[ScalingRecord], w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(CSV_HEADER)?;
    for r in records {
        wr.write_record([
            r.family_id.clone(),
            format!("{:.16e}", r.size_param),
            format!("{:.16e}", r.w_distance),
            r.measure_kind.as_str().to_string(),
            r.seed.to_string(),
        ])?;
    }
    wr.flush()?;
    Ok(())
}

#[derive(Deserialize)]
struct CsvRow {
    family_id: String,
    size_param: f64,
    w_distance: f64,
    measure_kind: String,
    seed: u64,
}

pub fn read_records_csv<R: Read>(r: R) -> Result<Vec<ScalingRecord>> {
    let mut rd = csv::Reader::from_reader(r);
    let mut out = Vec::new();
    for row in rd.deserialize() {
        let row: CsvRow = row?;
        // family ids written by scans are `tag/param/hash`
        let mut parts = row.family_id.splitn(3, '/');
        let (param, spec_hash) = match (parts.next(), parts.next(), parts.next()) {
            (Some(_), Some(p), Some(h)) => (p.parse().unwrap_or(f64::NAN), h.to_string()),
            _ => (f64::NAN, String::new()),
        };
        out.push(ScalingRecord {
            measure_kind: row.measure_kind.parse()?,
            family_id: row.family_id,
            size_param: row.size_param,
            w_distance: row.w_distance,
            seed: row.seed,
            param,
            spec_hash,
        });
    }
    Ok(out)
}
