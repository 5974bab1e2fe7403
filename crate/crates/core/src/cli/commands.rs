use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use rand::Rng;

use super::config::{Command, ExperimentConfig};
use crate::dynamics::{box_counting_dimension, injectivity_check, parse_point_cloud, tongue_measure, TongueSpec};
use crate::engine::{
    estimate_failure_measure, failure_density_profile, predicate_from_spec, translate_scan, ProfileSpec,
    DEFAULT_SAMPLES, PROFILE_CSV_HEADER, SHYNESS_CSV_HEADER,
};
use crate::error::{Error, Result};
use crate::hopf::{self, hopf_classify, PlanarFamily, SearchBox};
use crate::measures::{
    binary_shift_union, binary_shift_union_measure, convolve, densities, liouville_neighborhood, measure_of,
    parse_intervals, parse_measure, translation_grid_1d, BoxRegion, DiscreteMeasure, IntervalSet, Periodic, Region,
    BINARY_SHIFT_MAX_N,
};
use crate::polyjet::text::parse_single;
use crate::probes::{
    constant_probe, constant_probe_on, harmonic_probe, linear_probe, parse_probe, polynomial_probe, Element, Probe,
};
use crate::seeding;

/// Report text plus CSV header and rows of one run.
#[derive(Clone, Debug, PartialEq)]
pub struct Outputs {
    pub report: String,
    pub csv_header: String,
    pub rows: Vec<String>,
}

impl Outputs {
    pub fn csv(&self, cmd: Command) -> String {
        let mut s = format!("# schema=1 command={cmd}\n{}\n", self.csv_header);
        for r in &self.rows {
            s.push_str(r);
            s.push('\n');
        }
        s
    }
}

fn read(p: &Path) -> Result<String> {
    fs::read_to_string(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))
}

fn with_file<T>(p: &Path, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Parse { line, msg } => Error::Parse { line, msg: format!("{}: {msg}", p.display()) },
        other => other,
    })
}

pub fn execute(cfg: &ExperimentConfig) -> Result<Outputs> {
    match cfg.command {
        Command::Shyness => shyness(cfg),
        Command::Tongues => tongues(cfg),
        Command::Hopf => hopf_cmd(cfg),
        Command::Sets => sets(cfg),
        Command::Convolve => convolve_cmd(cfg),
        Command::Density => density(cfg),
        Command::Dimension => dimension(cfg),
    }
}

fn usize_list(v: &str) -> Result<Vec<usize>> {
    v.split(',').map(|t| t.trim().parse().map_err(|_| Error::input(format!("bad integer `{t}`")))).collect()
}

/// `constant:m`, `constant-on:n,m`, `polynomial:n,m,k`, `linear:n,m`,
/// `harmonic:N`.
fn builtin_probe(spec: &str) -> Result<Probe> {
    let (kind, args) = spec.split_once(':').ok_or_else(|| Error::input(format!("bad probe `{spec}`")))?;
    let a = usize_list(args)?;
    match (kind, a.as_slice()) {
        ("constant", [m]) => constant_probe(*m),
        ("constant-on", [n, m]) => constant_probe_on(*n, *m),
        ("polynomial", [n, m, k]) => polynomial_probe(*n, *m, *k as u32),
        ("linear", [n, m]) => linear_probe(*n, *m),
        ("harmonic", [len]) => harmonic_probe(*len),
        _ => Err(Error::input(format!("unknown probe `{spec}`"))),
    }
}

fn random_translate(base: &Element, seed: u64, j: usize) -> Result<Element> {
    let mut rng = seeding::task_rng(seed, "translate-base", j as u64);
    match base {
        Element::Poly(f) => {
            let dirs = polynomial_probe(f.domain_dim(), f.range_dim(), 2)?;
            let lambda: Vec<f64> = (0..dirs.dim()).map(|_| rng.random_range(-1.0..=1.0)).collect();
            dirs.perturb(base, &lambda)
        }
        Element::Sequence(s) => Ok(Element::Sequence(s.iter().map(|v| v + rng.random_range(-1.0..=1.0)).collect())),
    }
}

fn shyness(cfg: &ExperimentConfig) -> Result<Outputs> {
    let mut probe = match cfg.input("probe") {
        Some(p) => with_file(&p[0], parse_probe(&read(&p[0])?))?,
        None => builtin_probe(cfg.get("probe").unwrap_or_default())?,
    };
    if let Some(r) = cfg.get("radius") {
        probe = probe.with_box_radius(r.parse().map_err(|_| Error::input(format!("bad radius `{r}`")))?)?;
    }
    let base = match cfg.input("base") {
        Some(p) => Element::Poly(with_file(&p[0], parse_single(&read(&p[0])?, "poly"))?),
        None => Element::zero(probe.ambient())?,
    };
    let pred_params: BTreeMap<String, String> = cfg
        .params
        .iter()
        .filter_map(|(k, v)| k.strip_prefix("p.").map(|k| (k.to_string(), v.clone())))
        .collect();
    let pred = predicate_from_spec(cfg.get("predicate").unwrap_or_default(), &pred_params)?;
    let n: usize = cfg.num("samples", DEFAULT_SAMPLES)?;
    if let Some(levels) = cfg.get("levels") {
        let levels: Vec<u32> = usize_list(levels)?.into_iter().map(|l| l as u32).collect();
        let mut spec = ProfileSpec::for_probe(&probe, levels, cfg.seed);
        spec.samples_per_cell = cfg.num("samples_per_cell", spec.samples_per_cell)?;
        let prof = failure_density_profile(pred.as_ref(), &probe, &base, &spec)?;
        let mut report = format!("profile {}\nprobe_dim {}\nseed {}\nsamples_per_cell {}\n", pred.name(), probe.dim(), cfg.seed, spec.samples_per_cell);
        for row in &prof {
            report.push_str(&format!(
                "level {} fraction {:?} coverage {:?}{}\n",
                row.level,
                row.fraction,
                row.coverage,
                if row.coverage_exact { " (exact)" } else { " (sampled)" }
            ));
        }
        return Ok(Outputs {
            report,
            csv_header: PROFILE_CSV_HEADER.into(),
            rows: prof.iter().map(|r| r.csv_row()).collect(),
        });
    }
    let translates: usize = cfg.num("translates", 0)?;
    if translates > 0 {
        let bases: Vec<Element> =
            (0..translates).map(|j| if j == 0 { Ok(base.clone()) } else { random_translate(&base, cfg.seed, j) }).collect::<Result<_>>()?;
        let scan = translate_scan(pred.as_ref(), &probe, &bases, n, cfg.seed)?;
        let mut report = format!("translate_scan {}\ntranslates {}\nmax_fraction {:?}\n", pred.name(), translates, scan.max_fraction);
        for (j, r) in scan.rows.iter().enumerate() {
            report.push_str(&format!("# translate {j}\n{}", r.write_text()));
        }
        return Ok(Outputs {
            report,
            csv_header: SHYNESS_CSV_HEADER.into(),
            rows: scan.rows.iter().map(|r| r.csv_row()).collect(),
        });
    }
    let r = estimate_failure_measure(&base, &probe, pred.as_ref(), n, cfg.seed)?;
    Ok(Outputs { report: r.write_text(), csv_header: SHYNESS_CSV_HEADER.into(), rows: vec![r.csv_row()] })
}

fn tongues(cfg: &ExperimentConfig) -> Result<Outputs> {
    let mut spec = TongueSpec::new(cfg.required("eps")?, cfg.num("grid", 4000)?, cfg.seed);
    spec.q_max = cfg.num("q_max", spec.q_max)?;
    spec.burn_in = cfg.num("burn_in", spec.burn_in)?;
    let r = tongue_measure(&spec)?;
    let report = format!(
        "eps {:?}\ngrid {}\nq_max {}\nburn_in {}\nseed {}\nlocked_fraction {:?}\nundecided {}\n\
         # only tongues of period <= q_max are detected, so locked_fraction is biased low\n",
        spec.eps, spec.grid, spec.q_max, spec.burn_in, spec.seed, r.locked_fraction, r.undecided
    );
    Ok(Outputs { report, csv_header: "omega,locked,period,multiplier".into(), rows: r.csv_rows() })
}

fn hopf_cmd(cfg: &ExperimentConfig) -> Result<Outputs> {
    let p = &cfg.input("family").expect("validated")[0];
    let fam = PlanarFamily::new(with_file(p, parse_single(&read(p)?, "family"))?)?;
    let b = cfg.list("box")?.unwrap_or_else(|| vec![-1.0, 1.0, -1.0, 1.0, -1.0, 1.0]);
    if b.len() != 6 {
        return Err(Error::input("box needs mu_lo,mu_hi,x_lo,x_hi,y_lo,y_hi"));
    }
    let sb = SearchBox { lo: [b[0], b[2], b[4]], hi: [b[1], b[3], b[5]], per_axis: cfg.num("per_axis", 7)? };
    let reports = hopf_classify(&fam, &sb)?;
    Ok(Outputs {
        report: hopf::write_report(&reports),
        csv_header: hopf::CSV_HEADER.into(),
        rows: reports.iter().map(|r| r.csv_row()).collect(),
    })
}

/// Levels listed in the binary-shift interval CSV by default.
pub const DEFAULT_CSV_N_MAX: u32 = 16;

fn interval_rows(s: &IntervalSet) -> Vec<String> {
    s.intervals().iter().map(|(a, b)| format!("{a:?},{b:?}")).collect()
}

fn sets(cfg: &ExperimentConfig) -> Result<Outputs> {
    match cfg.get("example").unwrap_or_default() {
        "binary-shift" => {
            let m: u32 = cfg.required("m")?;
            let n_max: u32 = cfg.num("n_max", m + 25)?;
            let csv_n_max: u32 = cfg.num("csv_n_max", DEFAULT_CSV_N_MAX.min(n_max))?;
            if csv_n_max > BINARY_SHIFT_MAX_N || csv_n_max > n_max {
                return Err(Error::input(format!("csv_n_max must be <= min(n_max, {BINARY_SHIFT_MAX_N})")));
            }
            let measure = binary_shift_union_measure(m, n_max)?;
            let listed = binary_shift_union(m, csv_n_max)?;
            let bound = 2f64.powi(-(m as i32));
            let report = format!(
                "example binary-shift\nm {m}\nn_max {n_max}\nmeasure {measure:?}\nbound {bound:?}\nbelow_bound {}\n\
                 csv_levels {}..={csv_n_max}\ncsv_intervals {}\ncsv_measure {:?}\n",
                measure < bound,
                m + 1,
                listed.len(),
                listed.measure()
            );
            Ok(Outputs { report, csv_header: "a,b".into(), rows: interval_rows(&listed) })
        }
        "liouville" => {
            let c: f64 = cfg.required("c")?;
            let n: u32 = cfg.required("n")?;
            let q_max: u32 = cfg.required("q_max")?;
            let s = liouville_neighborhood(c, n, q_max)?;
            let report = format!(
                "example liouville\nc {c:?}\nn {n}\nq_max {q_max}\nintervals {}\nmeasure {:?}\n",
                s.len(),
                s.measure()
            );
            Ok(Outputs { report, csv_header: "a,b".into(), rows: interval_rows(&s) })
        }
        other => Err(Error::input(format!("unknown example `{other}`; expected binary-shift or liouville"))),
    }
}

fn load_measures(paths: &[std::path::PathBuf]) -> Result<Vec<DiscreteMeasure>> {
    paths.iter().map(|p| with_file(p, parse_measure(&read(p)?))).collect()
}

fn convolve_cmd(cfg: &ExperimentConfig) -> Result<Outputs> {
    let ms = load_measures(cfg.input("measures").expect("validated"))?;
    if ms.len() < 2 {
        return Err(Error::input("convolve needs at least two measures"));
    }
    let mut acc = ms[0].clone();
    for m in &ms[1..] {
        acc = convolve(&acc, m)?;
    }
    let d = acc.dim();
    let mut report = format!(
        "measures {}\ndim {d}\natoms {}\ntotal_mass {:?}\nsupport_diameter {:?}\n",
        ms.len(),
        acc.num_atoms(),
        acc.total_mass(),
        acc.support_diameter()
    );
    if let Some(b) = cfg.list("box")? {
        if b.len() != 2 * d {
            return Err(Error::input(format!("box needs {} numbers lo1,hi1,...", 2 * d)));
        }
        let s = BoxRegion { lo: b.iter().step_by(2).copied().collect(), hi: b.iter().skip(1).step_by(2).copied().collect() };
        report.push_str(&format!("box_measure {:?}\n", measure_of(&acc, &s)));
    }
    let header: Vec<String> = (1..=d).map(|i| format!("x{i}")).chain(["weight".to_string()]).collect();
    let rows = acc
        .atoms()
        .map(|(x, w)| x.iter().map(|v| format!("{v:?}")).chain([format!("{w:?}")]).collect::<Vec<_>>().join(","))
        .collect();
    Ok(Outputs { report, csv_header: header.join(","), rows })
}

fn density(cfg: &ExperimentConfig) -> Result<Outputs> {
    let p = &cfg.input("set").expect("validated")[0];
    let base = with_file(p, parse_intervals(&read(p)?))?;
    let periodic;
    let s: &dyn Region = match cfg.get("period") {
        Some(_) => {
            periodic = Periodic { base: base.clone(), period: cfg.required("period")? };
            &periodic
        }
        None => &base,
    };
    let family = match (cfg.input("family"), cfg.list("family_widths")?) {
        (Some(paths), None) => load_measures(paths)?,
        (None, Some(ws)) => {
            let k: usize = cfg.num("family_atoms", 4001)?;
            ws.iter().map(|&w| DiscreteMeasure::uniform_grid_1d(-w, w, k)).collect::<Result<_>>()?
        }
        _ => return Err(Error::input("density needs exactly one of `family` (files) or `family_widths`")),
    };
    let g: Vec<f64> = cfg
        .get("grid")
        .unwrap_or_default()
        .split(':')
        .map(|t| t.trim().parse::<f64>().map_err(|_| Error::input("grid must be lo:hi:step")))
        .collect::<Result<_>>()?;
    if g.len() != 3 {
        return Err(Error::input("grid must be lo:hi:step"));
    }
    let grid = translation_grid_1d(g[0], g[1], g[2])?;
    let r = densities(s, &family, &grid)?;
    let report = format!(
        "family {}\ngrid {}\nlower {:?} (member {})\nupper {:?} (member {})\n\
         # brackets over the supplied family and translation grid only\n",
        r.family_size, r.grid_size, r.lower, r.lower_witness, r.upper, r.upper_witness
    );
    let rows = r.per_measure_range().iter().enumerate().map(|(i, (lo, hi))| format!("{i},{lo:?},{hi:?}")).collect();
    Ok(Outputs { report, csv_header: "member,min,max".into(), rows })
}

fn dimension(cfg: &ExperimentConfig) -> Result<Outputs> {
    let p = &cfg.input("points").expect("validated")[0];
    let pts = with_file(p, parse_point_cloud(&read(p)?))?;
    let scales = cfg.list("scales")?.expect("validated");
    let b = box_counting_dimension(&pts, &scales)?;
    let mut report = format!("points {}\nscales {}\ndimension {:?}\n", pts.len(), scales.len(), b.dimension);
    if let Some(mp) = cfg.input("map") {
        let l: Vec<Vec<f64>> = with_file(&mp[0], parse_point_cloud(&read(&mp[0])?))?;
        let v = injectivity_check(&pts, &l, cfg.required("delta")?)?;
        report.push_str(&format!(
            "injectivity delta {} collision_free {} collisions {}\n",
            cfg.get("delta").unwrap_or_default(),
            v.collision_free,
            v.collisions
        ));
        if let Some((i, j)) = v.example {
            report.push_str(&format!("first_collision {i} {j}\n"));
        }
    }
    let rows = b.counts.iter().map(|(s, c)| format!("{s:?},{c}")).collect();
    Ok(Outputs { report, csv_header: "scale,count".into(), rows })
}

