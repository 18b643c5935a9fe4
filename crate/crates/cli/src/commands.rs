use crate::config::{CliError, RunConfig};
use crate::Check;
use quermass::asymmetry::{centered_asymmetry, fraenkel_asymmetry, AsymmetryOptions};
use quermass::functionals::{
    barycenter, ball_quermass, curvature_integrals, curvature_integrals_checked, deficit_from_integrals, volume,
    DeficitSpec, Normalization,
};
use quermass::geometry::{default_resolution, NearlySphericalSet, SCAN_FACTOR};
use quermass::sphere::{QuadratureGrid, SpherePoint};
use quermass::verify::{
    check_quermass_stability, check_spectral_gap, check_sup_norm_growth, check_volume_stability,
    closed_form_discrepancy, divergence_identity, fmt_float, integrated_identity, random_function, sample_rng,
    sample_set, scale_to, taylor_constant, test_fields, DeficitReport, SampleSpec, DEFICIT_CSV_HEADER,
};
use serde_json::json;
use std::fs;
use std::path::Path;

/// Warns when a requested resolution is below the default for the degree.
fn warn_if_coarse(config: &RunConfig, degree: usize) {
    let default = default_resolution(config.dim(), degree);
    if let Some(r) = config.resolution {
        if r < default {
            eprintln!(
                "warning: resolution {r} is below the default {default} for degree {degree}; \
                 integrals are checked against a doubled grid but may lose accuracy"
            );
        }
    }
}

fn grid_for(config: &RunConfig, omega: &NearlySphericalSet) -> Result<QuadratureGrid, CliError> {
    warn_if_coarse(config, omega.u().max_degree());
    match config.resolution {
        Some(r) => Ok(QuadratureGrid::new(omega.dim(), r)?),
        None => Ok(omega.default_grid()),
    }
}

fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| fmt_float(*x)).collect();
    format!("[{}]", parts.join(", "))
}

pub fn info(config: &RunConfig) -> Result<bool, CliError> {
    let omega = NearlySphericalSet::new(config.function()?)?;
    let dim = omega.dim();
    let n = dim.n();
    let grid = grid_for(config, &omega)?;
    let checked = curvature_integrals_checked(&omega, &grid)?;
    for (k, c) in checked.iter().enumerate() {
        if c.under_resolved() {
            eprintln!(
                "warning: I_{k} changes by {:.2e} (relative) when the grid is doubled; raise --resolution",
                c.relative_change()
            );
        }
    }
    let integrals: Vec<f64> = checked.iter().map(|c| c.value).collect();
    println!("n               {n}");
    println!("max degree      {}", omega.u().max_degree());
    println!("resolution      {}", grid.resolution());
    println!("volume          {}", fmt_float(volume(&omega)));
    println!("barycenter      {}", fmt_vec(&barycenter(&omega)));
    for (k, v) in integrals.iter().enumerate() {
        println!("I_{k}             {}  (unit ball {})", fmt_float(*v), fmt_float(ball_quermass(dim, k as i64, 1.0)));
    }
    for k in 1..=n {
        for m in -1..k as i64 {
            let d = deficit_from_integrals(&omega, DeficitSpec::new(n, k, m)?, &integrals)?;
            println!("{:<16}{}", format!("delta_{{{k},{m}}}"), fmt_float(d));
        }
    }
    let a = fraenkel_asymmetry(&omega, &grid, &AsymmetryOptions { seed: config.seed, ..Default::default() })?;
    println!("alpha           {}", fmt_float(a.alpha));
    println!("alpha center    {}", fmt_vec(&a.center));
    let s = omega.sup_norms();
    println!("sup |u|         {}", fmt_float(s.value));
    println!("sup |grad u|    {}", fmt_float(s.gradient));
    println!("sup |hess u|    {}", fmt_float(s.hessian));
    Ok(true)
}

pub fn asymmetry(config: &RunConfig) -> Result<bool, CliError> {
    let omega = NearlySphericalSet::new(config.function()?)?;
    let grid = grid_for(config, &omega)?;
    let opts = AsymmetryOptions {
        seed: config.seed,
        ..Default::default()
    };
    let a = fraenkel_asymmetry(&omega, &grid, &opts)?;
    println!("alpha           {}", fmt_float(a.alpha));
    println!("center          {}", fmt_vec(&a.center));
    println!("ball radius     {}", fmt_float(a.radius));
    println!("centered value  {}", fmt_float(centered_asymmetry(&omega, &grid)?));
    println!("evaluations     {}", a.evaluations);
    Ok(true)
}

struct Suite {
    passed: bool,
}

impl Suite {
    fn record(&mut self, name: &str, ok: bool, detail: String) {
        println!("{} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
        self.passed &= ok;
    }
}

pub fn verify(config: &RunConfig) -> Result<bool, CliError> {
    let dim = config.dim();
    let n = dim.n();
    let l = config.max_degree;
    let eps = config.epsilons.iter().cloned().fold(0.0, f64::max);
    let count = config.count;
    let mut suite = Suite { passed: true };

    let domains: Vec<NearlySphericalSet> = (0..count)
        .map(|i| {
            let v = random_function(dim, 2, l, &mut sample_rng(config.seed, i));
            Ok(NearlySphericalSet::new(scale_to(&v, eps)?.0)?)
        })
        .collect::<Result<_, CliError>>()?;
    warn_if_coarse(config, l);
    let grid = match config.resolution {
        Some(r) => QuadratureGrid::new(dim, r)?,
        None => QuadratureGrid::new(dim, 2 * default_resolution(dim, l))?,
    };

    // resolution check first, so warnings precede any failure they explain
    let mut under = 0;
    let mut worst_change: f64 = 0.0;
    for omega in &domains {
        let checked = curvature_integrals_checked(omega, &grid)?;
        if checked.iter().any(|c| c.under_resolved()) {
            under += 1;
        }
        worst_change = checked.iter().map(|c| c.relative_change()).fold(worst_change, f64::max);
    }
    if under > 0 {
        eprintln!(
            "warning: {under} of {count} domains have curvature integrals under-resolved at resolution {} \
             (largest relative change under doubling {worst_change:.2e})",
            grid.resolution()
        );
    }

    let mut worst: f64 = 0.0;
    for (i, omega) in domains.iter().enumerate() {
        for j in 0..10 {
            let t = (i * 10 + j) as f64;
            let p = SpherePoint::new(dim, &[0.3 + (t * 0.618_033_988_7) % 2.5, (t * 1.324_717_957) % std::f64::consts::TAU]);
            worst = worst.max(closed_form_discrepancy(&omega.u().jet_at(&p)?)?);
        }
    }
    suite.record("closed form vs eigenvalues", worst <= 1e-10, format!("max relative error {worst:.2e}"));

    let mut gb: f64 = 0.0;
    let mut scale_i: f64 = 0.0;
    let mut scale_d: f64 = 0.0;
    for omega in &domains {
        let base = curvature_integrals(omega, &grid)?;
        gb = gb.max((base[n] - dim.area()).abs());
        for r in [0.5, 2.0] {
            let scaled = NearlySphericalSet::new(omega.u().radially_scaled(r))?;
            let got = curvature_integrals(&scaled, &grid)?;
            for k in 0..=n {
                scale_i = scale_i.max((got[k] - r.powi((n - k) as i32) * base[k]).abs() / base[k].abs().max(1.0));
            }
            for k in 1..=n {
                for m in -1..k as i64 {
                    let spec = DeficitSpec::new(n, k, m)?;
                    let d0 = deficit_from_integrals(omega, spec, &base)?;
                    let d1 = deficit_from_integrals(&scaled, spec, &got)?;
                    scale_d = scale_d.max((d0 - d1).abs());
                }
            }
        }
    }
    suite.record("Gauss-Bonnet", gb <= 1e-8, format!("max |I_n − Area| {gb:.2e}"));
    suite.record(
        "scaling laws",
        scale_i <= 1e-10 && scale_d <= 1e-8,
        format!("integrals {scale_i:.2e}, deficits {scale_d:.2e}"),
    );

    let exact = QuadratureGrid::new(dim, default_resolution(dim, l + 4))?;
    let mut div: f64 = 0.0;
    let mut ibp: f64 = 0.0;
    for omega in &domains {
        for m in 1..=n {
            for f in test_fields(dim, 4) {
                let (a, b) = divergence_identity(omega.u(), f, m, &exact)?;
                div = div.max((a - b).abs());
            }
        }
        for m in 0..=1 {
            let (a, b) = integrated_identity(omega.u(), m, &exact)?;
            ibp = ibp.max((a - b).abs());
        }
    }
    suite.record("Newton-tensor divergence identity", div <= 1e-8, format!("max error {div:.2e}"));
    suite.record("gradient identity, orders 0 and 1", ibp <= 1e-10, format!("max error {ibp:.2e}"));

    let shape = random_function(dim, 2, l, &mut sample_rng(config.seed, count));
    let scan = QuadratureGrid::new(dim, SCAN_FACTOR * default_resolution(dim, l))?;
    let mut spread: f64 = 1.0;
    for m in 1..=3 {
        let c: Vec<f64> = [0.08, 0.04, 0.02, 0.01]
            .iter()
            .map(|&e| Ok(taylor_constant(&scale_to(&shape, e)?.0, m, e, &scan)?))
            .collect::<Result<_, CliError>>()?;
        let hi = c.iter().cloned().fold(0.0, f64::max);
        let lo = c.iter().cloned().fold(f64::INFINITY, f64::min);
        spread = spread.max(hi / lo);
    }
    suite.record("Taylor remainder constant", spread <= 2.0, format!("spread over ε halvings {spread:.3}"));

    let gap_eps = eps.min(0.05);
    let samples = sample_set(&SampleSpec::new(n, l, gap_eps, count, config.seed))?;
    let gap = samples.iter().map(|s| check_spectral_gap(&s.set, gap_eps)).fold(f64::INFINITY, f64::min);
    suite.record("spectral gap", gap >= 0.0, format!("min margin {gap:.3e} at ε = {gap_eps}"));

    Ok(suite.passed)
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::io(format!("writing {}", path.display()), e))
}

pub fn sweep(config: &RunConfig, check: Check) -> Result<bool, CliError> {
    let dir = &config.output_dir;
    fs::create_dir_all(dir).map_err(|e| CliError::io(format!("creating {}", dir.display()), e))?;
    let mode = Normalization::from_index(config.m)?;
    let base = SampleSpec::new(config.n, config.max_degree, config.epsilons[0], config.count, config.seed)
        .with_normalization(mode);
    let mut summary = json!({
        "command": "sweep",
        "n": config.n,
        "k": config.k,
        "m": config.m,
        "max_degree": config.max_degree,
        "count": config.count,
        "seed": config.seed,
        "epsilons": config.epsilons,
    });
    let passed = match check {
        Check::Stability => {
            let mut reports: Vec<DeficitReport> = Vec::new();
            for &eps in &config.epsilons {
                let spec = SampleSpec { epsilon: eps, ..base.clone() };
                let report = if config.m < 0 {
                    check_volume_stability(&spec, config.k)?
                } else {
                    check_quermass_stability(&spec, config.m as usize, config.k)?
                };
                let s = &report.summary;
                println!(
                    "{} eps={} min_margin={} failures={}",
                    if s.passed { "PASS" } else { "FAIL" },
                    eps,
                    fmt_float(s.min_margin),
                    s.failures.len()
                );
                if let Err(e) = report.ensure_passed() {
                    eprintln!("{e}");
                }
                reports.push(report);
            }
            let mut csv = format!("{DEFICIT_CSV_HEADER}\n");
            for r in &reports {
                csv.push_str(&r.csv_rows());
            }
            write(&dir.join("sweep.csv"), &csv)?;
            let passed = reports.iter().all(|r| r.summary.passed);
            summary["check"] = json!("stability");
            summary["reports"] = json!(reports.iter().map(|r| &r.summary).collect::<Vec<_>>());
            passed
        }
        Check::Growth => {
            if config.m != -1 {
                return Err(CliError::Usage("the growth check uses the volume constraint (m = −1)".into()));
            }
            let report = check_sup_norm_growth(&base, config.k, &config.epsilons)?;
            write(&dir.join("growth.csv"), &report.to_csv())?;
            let ratios: Vec<String> = report.max_ratio.iter().map(|r| format!("{r:.4}")).collect();
            println!(
                "{} max ratios [{}] (limit {}× per step)",
                if report.passed { "PASS" } else { "FAIL" },
                ratios.join(", "),
                report.growth_limit
            );
            summary["check"] = json!("growth");
            summary["growth"] = json!({
                "a_constant": report.a_constant,
                "max_ratio": report.max_ratio,
                "growth": report.growth,
                "growth_limit": report.growth_limit,
                "excluded": report.excluded,
                "passed": report.passed,
            });
            report.passed
        }
    };
    summary["passed"] = json!(passed);
    let text = serde_json::to_string_pretty(&summary).expect("summary serializes");
    write(&dir.join("summary.json"), &(text + "\n"))?;
    Ok(passed)
}
