//! One function per mode; each returns the report and the CSV tables to write.

use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pointspec::dynamics::{
    crossing_period, dephase, discretize, evolve, DephaseOptions, DiscreteHamiltonian, EvolveOptions, GridSpec,
    GridState, PhaseSource, TwoLevelOracle, HERMITICITY_TOL,
};
use pointspec::{
    boundary_form_one_point, boundary_form_two_point, build_two_point, default_sweep, delta_bound_state, even_state,
    find_bound_states, local_beta_for, odd_state, one_point_eigenfunctions, projection_residual,
    verify_against_analytic, verify_one_point, BoundState, OnePointBoundaryData, OnePointExtension, Parity,
    PiecewiseExpFunction, PointInteraction, ScanOptions, SpectrumScan, VerificationReport, INTERFACE_TOL,
    LOCALITY_TOL, VERIFY_TOL,
};

use crate::config::{Interaction, Mode, RunConfig, StateChoice};
use crate::report::*;
use crate::CliError;

type C = Complex64;

/// Random interface-satisfying pairs drawn by `extension`.
pub const BOUNDARY_PAIRS: usize = 100;
pub const NORM_DRIFT_TOL: f64 = 1e-8;
pub const PERIOD_REL_TOL: f64 = 0.02;
pub const LEAK_TOL: f64 = 1e-4;
pub const KICK_TOL: f64 = 1e-14;
/// Longest recorded trajectory.
pub const MAX_RECORDS: usize = 2000;

pub fn run(cfg: &RunConfig) -> Result<(Report, Artifacts), CliError> {
    let mut report = Report {
        version: REPORT_VERSION,
        mode: cfg.mode.as_str(),
        extension: None,
        bound_states: Vec::new(),
        checks: Vec::new(),
        notes: Vec::new(),
        parameters: Parameters {
            half_width: cfg.half_width,
            n: cfg.points,
            dt: cfg.dt,
            steps: cfg.steps,
            kappa_min: cfg.kappa_min,
            kappa_max: cfg.kappa_max,
            ensemble: cfg.ensemble,
            seed: cfg.seed,
            tol: cfg.tol,
            threshold: cfg.threshold,
            state: cfg.state.as_str(),
        },
        eigenfunction: None,
        grid: None,
        evolution: None,
        dephasing: None,
        sweep: None,
    };
    let mut artifacts = Artifacts::default();
    log::info!("running {} mode", cfg.mode);

    let Some(interaction) = cfg.interaction else {
        verify_sweep(cfg, &mut report)?;
        return Ok((report, artifacts));
    };
    let ext = point_interaction(interaction)?;
    report.extension = Some(extension_section(interaction, &ext));

    match cfg.mode {
        Mode::Extension => extension_checks(cfg, &ext, &mut report),
        Mode::Spectrum => {
            let scan = find_bound_states(&ext, &scan_options(cfg))?;
            record_scan(&scan, &mut report);
        }
        Mode::Eigenfunction => eigenfunction(cfg, interaction, &ext, &mut report, &mut artifacts)?,
        Mode::Evolve => evolution(cfg, interaction, &ext, &mut report, &mut artifacts)?,
        Mode::Dephase => dephasing(cfg, interaction, &ext, &mut report, &mut artifacts)?,
        Mode::Verify => {
            let v = match ext {
                PointInteraction::TwoPoint(t) => verify_against_analytic(&t, &scan_options(cfg))?,
                PointInteraction::OnePoint(o) => verify_one_point(&o, &scan_options(cfg))?,
            };
            record_verification(cfg, &v, "", &mut report);
            record_scan(&v.scan, &mut report);
        }
    }
    Ok((report, artifacts))
}

pub fn point_interaction(i: Interaction) -> Result<PointInteraction, CliError> {
    Ok(match i {
        Interaction::TwoPoint { alpha, beta, h } => build_two_point(alpha, beta, h)?.into(),
        Interaction::DeltaPrime { alpha, beta } => OnePointExtension::delta_prime(alpha, beta)?.into(),
        Interaction::Delta { c } => OnePointExtension::delta(c)?.into(),
    })
}

fn scan_options(cfg: &RunConfig) -> ScanOptions {
    ScanOptions {
        kappa_min: cfg.kappa_min,
        kappa_max: cfg.kappa_max,
        ..ScanOptions::default()
    }
}

fn extension_section(i: Interaction, ext: &PointInteraction) -> ExtensionSection {
    let mut s = ExtensionSection {
        kind: i.kind().as_str(),
        alpha: None,
        beta: None,
        h: None,
        c: None,
        b: None,
        relation: "",
        local: true,
        parity_symmetric: true,
        entanglement_ratio: None,
        local_beta: None,
        decoupled: None,
    };
    match (i, ext) {
        (Interaction::TwoPoint { alpha, beta, h }, PointInteraction::TwoPoint(t)) => {
            s.alpha = Some(alpha);
            s.beta = Some(beta);
            s.h = Some(h);
            s.b = Some(t.coupling().rows());
            s.relation = "y(-h+0) - y(-h-0), y(h+0) - y(h-0) = B (y'(-h), y'(h)); y' continuous";
            s.local = t.is_local(LOCALITY_TOL);
            s.parity_symmetric = t.coupling().is_parity_symmetric();
            s.entanglement_ratio = t.entanglement_ratio().ok();
            s.local_beta = local_beta_for(alpha, h).ok();
        }
        (Interaction::DeltaPrime { alpha, beta }, PointInteraction::OnePoint(o)) => {
            s.alpha = Some(alpha);
            s.beta = Some(beta);
            s.b = o.value_from_derivative().ok();
            s.relation = "(y(-0), y(+0)) = B (y'(-0), y'(+0))";
            s.decoupled = o.is_decoupled().ok();
        }
        (Interaction::Delta { c }, _) => {
            s.c = Some(c);
            s.relation = "y(-0) = y(+0), y'(+0) - y'(-0) = c y(0)";
        }
        _ => unreachable!("interaction and extension built from the same parameters"),
    }
    s
}

fn random_c(rng: &mut ChaCha8Rng) -> C {
    C::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

fn one_point_sample(ext: &OnePointExtension, rng: &mut ChaCha8Rng) -> OnePointBoundaryData {
    match *ext {
        OnePointExtension::Delta { c } => {
            let y = random_c(rng);
            let d = random_c(rng);
            OnePointBoundaryData {
                y_minus: y,
                y_plus: y,
                dy_minus: d,
                dy_plus: d + y * c,
            }
        }
        OnePointExtension::DeltaPrime { .. } => {
            let a = ext.value_from_derivative().expect("delta-prime");
            let (dm, dp) = (random_c(rng), random_c(rng));
            OnePointBoundaryData {
                y_minus: dm * a[0][0] + dp * a[0][1],
                y_plus: dm * a[1][0] + dp * a[1][1],
                dy_minus: dm,
                dy_plus: dp,
            }
        }
    }
}

/// Boundary form on seeded random pairs that satisfy the interface conditions.
fn extension_checks(cfg: &RunConfig, ext: &PointInteraction, report: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (mut worst, mut scale, mut satisfied) = (0.0f64, 1.0f64, true);
    match ext {
        PointInteraction::TwoPoint(t) => {
            scale = scale.max(t.coupling().max_abs());
            for _ in 0..BOUNDARY_PAIRS {
                let y = t.sample_interface_data(&mut rng);
                let z = t.sample_interface_data(&mut rng);
                satisfied &= t.satisfies_interface(&y, INTERFACE_TOL) && t.satisfies_interface(&z, INTERFACE_TOL);
                worst = worst.max(boundary_form_two_point(&y, &z).norm());
            }
            let b = t.coupling().rows();
            report
                .checks
                .push(CheckEntry::condition("coupling_symmetric", b[0][1] == b[1][0]));
        }
        PointInteraction::OnePoint(o) => {
            if let Ok(a) = o.value_from_derivative() {
                scale = scale.max(a.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs())));
            }
            if let OnePointExtension::Delta { c } = o {
                scale = scale.max(c.abs());
            }
            for _ in 0..BOUNDARY_PAIRS {
                let y = one_point_sample(o, &mut rng);
                let z = one_point_sample(o, &mut rng);
                satisfied &= o.satisfies_conditions(&y, INTERFACE_TOL) && o.satisfies_conditions(&z, INTERFACE_TOL);
                worst = worst.max(boundary_form_one_point(&y, &z).norm());
            }
        }
    }
    report.checks.push(CheckEntry::condition("interface_conditions_hold", satisfied));
    report
        .checks
        .push(CheckEntry::new("boundary_form_max", worst, 1e-12 * scale * scale));
}

fn parity_name(s: &BoundState) -> &'static str {
    if s.multiplicity > 1 {
        return "degenerate";
    }
    match s.parity() {
        Parity::Even => "even",
        Parity::Odd => "odd",
        Parity::None => "none",
    }
}

fn record_scan(scan: &SpectrumScan, report: &mut Report) {
    report.bound_states = scan
        .states
        .iter()
        .map(|s| BoundStateEntry {
            kappa: s.kappa,
            lambda: s.lambda,
            multiplicity: s.multiplicity,
            parity: parity_name(s),
        })
        .collect();
    for w in &scan.warnings {
        if !report.notes.contains(w) {
            report.notes.push(w.clone());
        }
    }
}

/// Copies checks, substituting the configured tolerance for the default one.
fn record_verification(cfg: &RunConfig, v: &VerificationReport, prefix: &str, report: &mut Report) {
    for c in &v.checks {
        let mut entry = CheckEntry::from(c);
        entry.name = format!("{prefix}{}", c.name);
        if c.tolerance == VERIFY_TOL {
            entry = CheckEntry::new(entry.name, entry.value, cfg.tol);
        }
        report.checks.push(entry);
    }
    for n in &v.notes {
        report.notes.push(format!("{prefix}{n}"));
    }
}

fn verify_sweep(cfg: &RunConfig, report: &mut Report) -> Result<(), CliError> {
    let mut entries = Vec::new();
    let mut worst = 0.0f64;
    for (alpha, beta, h) in default_sweep() {
        let ext = build_two_point(alpha, beta, h)?;
        let v = verify_against_analytic(&ext, &scan_options(cfg))?;
        let start = report.checks.len();
        record_verification(cfg, &v, &format!("alpha={alpha},beta={beta},h={h}/"), report);
        let max = v.max_discrepancy();
        worst = worst.max(max);
        entries.push(SweepEntry {
            alpha,
            beta,
            h,
            roots: v.scan.states.len(),
            max_discrepancy: max,
            pass: report.checks[start..].iter().all(|c| c.pass),
        });
    }
    log::info!("sweep of {} cases, max discrepancy {worst:e}", entries.len());
    report.checks.push(CheckEntry::new("max_discrepancy", worst, cfg.tol));
    report.sweep = Some(entries);
    Ok(())
}

/// Closed-form even and odd states of an interaction.
struct ClosedForms {
    even: PiecewiseExpFunction,
    odd: Option<PiecewiseExpFunction>,
    /// Sign `s` for which `even + s·odd` is concentrated on the left.
    side_sign: f64,
    cuts: Vec<f64>,
}

impl ClosedForms {
    fn of(i: Interaction) -> Result<Self, CliError> {
        Ok(match i {
            Interaction::TwoPoint { alpha, beta, h } => Self {
                even: even_state(alpha, h)?.function,
                odd: Some(odd_state(beta, h)?.function),
                side_sign: 1.0,
                cuts: vec![-h, h],
            },
            Interaction::DeltaPrime { alpha, beta } => {
                let mut states = one_point_eigenfunctions(alpha, beta)?.into_iter();
                let even = states.next().expect("even state").function;
                let odd = states.next().expect("odd state").function;
                Self {
                    even,
                    odd: Some(odd),
                    side_sign: -1.0,
                    cuts: vec![0.0],
                }
            }
            Interaction::Delta { c } => Self {
                even: delta_bound_state(c)?
                    .ok_or_else(|| CliError::invalid("c", "no bound state for c >= 0"))?
                    .function,
                odd: None,
                side_sign: 1.0,
                cuts: vec![0.0],
            },
        })
    }

    fn odd(&self) -> Result<&PiecewiseExpFunction, CliError> {
        self.odd
            .as_ref()
            .ok_or_else(|| CliError::invalid("state", "this interaction has no odd bound state"))
    }

    /// Weights on the supplied even and odd functions.
    fn weights(&self, state: StateChoice) -> (f64, f64) {
        match state {
            StateChoice::Even => (1.0, 0.0),
            StateChoice::Odd => (0.0, 1.0),
            StateChoice::Left => (1.0, self.side_sign),
            StateChoice::Right => (1.0, -self.side_sign),
        }
    }

    fn function(&self, state: StateChoice) -> Result<PiecewiseExpFunction, CliError> {
        let f = match state {
            StateChoice::Even => self.even.clone(),
            StateChoice::Odd => self.odd()?.clone(),
            _ => {
                let (_, s) = self.weights(state);
                self.even.add(&self.odd()?.scaled(C::new(s, 0.0))).map_err(|_| {
                    CliError::invalid("state", "left and right are eigenfunctions only when alpha = beta")
                })?
            }
        };
        Ok(f.normalized()?)
    }

    fn on_grid(&self, ham: &DiscreteHamiltonian, state: StateChoice) -> Result<GridState, CliError> {
        let (we, wo) = self.weights(state);
        let mut psi = sample(ham, &self.even)?.scaled(C::new(we, 0.0));
        if wo != 0.0 {
            psi = psi.add(&sample(ham, self.odd()?)?.scaled(C::new(wo, 0.0)));
        }
        Ok(psi.normalized()?)
    }

    fn references(&self, ham: &DiscreteHamiltonian) -> Result<Vec<GridState>, CliError> {
        let mut out = vec![sample(ham, &self.even)?.normalized()?];
        if let Some(g) = &self.odd {
            out.push(sample(ham, g)?.normalized()?);
        }
        Ok(out)
    }
}

fn sample(ham: &DiscreteHamiltonian, f: &PiecewiseExpFunction) -> Result<GridState, CliError> {
    Ok(GridState::sample(Arc::clone(ham.layout()), f)?)
}

fn eigenfunction(
    cfg: &RunConfig,
    i: Interaction,
    ext: &PointInteraction,
    report: &mut Report,
    artifacts: &mut Artifacts,
) -> Result<(), CliError> {
    let forms = ClosedForms::of(i)?;
    let f = forms.function(cfg.state)?;
    let kappa = f.kappa();

    let scan = find_bound_states(ext, &scan_options(cfg))?;
    record_scan(&scan, report);
    let nearest = scan
        .states
        .iter()
        .min_by(|a, b| (a.kappa - kappa).abs().total_cmp(&(b.kappa - kappa).abs()));
    match nearest {
        Some(s) => {
            report
                .checks
                .push(CheckEntry::new("kappa_error", (s.kappa - kappa).abs(), cfg.tol));
            let (l2, pointwise) = projection_residual(&f, &s.basis)?;
            report.checks.push(CheckEntry::new("projection_residual", l2, cfg.tol));
            report
                .checks
                .push(CheckEntry::new("pointwise_residual", pointwise, cfg.tol));
        }
        None => report.checks.push(CheckEntry::condition("root_present", false)),
    }

    let n = cfg.points;
    let l = cfg.half_width;
    artifacts.add(cfg.csv.as_deref(), || {
        let mut t = Table::new(vec!["x", "value", "derivative"]);
        for k in 0..n {
            let x = -l + 2.0 * l * k as f64 / (n - 1) as f64;
            t.push(vec![x, f.value(x).re, f.derivative_at(x).re]);
        }
        t
    });
    report.eigenfunction = Some(EigenfunctionSection {
        state: cfg.state.as_str(),
        kappa,
        lambda: -kappa * kappa,
        samples: n,
        norm: f.l2_norm(),
    });
    Ok(())
}

fn grid_hamiltonian(cfg: &RunConfig, ext: &PointInteraction, report: &mut Report) -> Result<DiscreteHamiltonian, CliError> {
    let grid = GridSpec::for_interaction(ext, cfg.half_width, cfg.points)?;
    let ham = discretize(ext, &grid)?;
    let defect = ham.hermiticity_defect();
    report.grid = Some(GridSection {
        half_width: cfg.half_width,
        n: cfg.points,
        dx: grid.dx(),
        unknowns: ham.dim(),
        far_couplings: ham.far_couplings().len(),
        hermiticity_defect: defect,
    });
    report
        .checks
        .push(CheckEntry::new("hermiticity_defect", defect, HERMITICITY_TOL));
    Ok(ham)
}

fn evolution(
    cfg: &RunConfig,
    i: Interaction,
    ext: &PointInteraction,
    report: &mut Report,
    artifacts: &mut Artifacts,
) -> Result<(), CliError> {
    let forms = ClosedForms::of(i)?;
    let ham = grid_hamiltonian(cfg, ext, report)?;
    let psi = forms.on_grid(&ham, cfg.state)?;
    let references = forms.references(&ham)?;
    let record_every = (cfg.steps / MAX_RECORDS).max(1);
    let opts = EvolveOptions {
        record_every,
        references,
    };
    let r = evolve(&ham, &psi, cfg.dt, cfg.steps, &opts)?;
    let t_final = cfg.steps as f64 * cfg.dt;
    let max_left = r.p_left().into_iter().fold(0.0, f64::max);
    let max_right = r.p_right().into_iter().fold(0.0, f64::max);
    report
        .checks
        .push(CheckEntry::new("norm_drift", r.max_norm_drift, NORM_DRIFT_TOL));

    let (mut oracle_period, mut measured_period, mut deviation) = (None, None, None);
    if let Some(g) = &forms.odd {
        let ke = forms.even.kappa();
        let ko = g.kappa();
        let oracle = TwoLevelOracle::new(&forms.even, g, -ke * ke, -ko * ko, &forms.cuts)?;
        let (we, wo) = forms.weights(cfg.state);
        let c = oracle.coefficients(C::new(we, 0.0), C::new(wo, 0.0));
        deviation = Some(
            r.samples
                .iter()
                .map(|s| (s.sides.left - oracle.at(c, s.t).sides.left).abs())
                .fold(0.0, f64::max),
        );
        let period = oracle.beat_period();
        let mixed = we != 0.0 && wo != 0.0;
        if period.is_finite() {
            oracle_period = Some(period);
            if mixed && t_final >= 2.0 * period {
                measured_period = crossing_period(&r.times(), &r.p_left());
                let err = measured_period.map_or(f64::INFINITY, |p| (p / period - 1.0).abs());
                report
                    .checks
                    .push(CheckEntry::new("beat_period_rel_error", err, PERIOD_REL_TOL));
            }
        } else if mixed {
            let (name, leak) = match cfg.state {
                StateChoice::Left => ("max_p_right", max_right),
                _ => ("max_p_left", max_left),
            };
            report.checks.push(CheckEntry::new(name, leak, LEAK_TOL));
        }
    }

    let has_odd = forms.odd.is_some();
    artifacts.add(cfg.csv.as_deref(), || {
        let mut header = vec!["t", "norm", "p_left", "p_gap", "p_right", "overlap_even_re", "overlap_even_im"];
        if has_odd {
            header.extend(["overlap_odd_re", "overlap_odd_im"]);
        }
        let mut t = Table::new(header);
        for s in &r.samples {
            let mut row = vec![s.t, s.norm, s.sides.left, s.sides.gap, s.sides.right];
            for o in &s.overlaps {
                row.extend([o.re, o.im]);
            }
            t.push(row);
        }
        t
    });
    artifacts.add(cfg.snapshot.as_deref(), || {
        let mut t = Table::new(vec!["x", "re", "im"]);
        for (x, a) in r.final_state.layout().positions().iter().zip(r.final_state.amplitudes()) {
            t.push(vec![*x, a.re, a.im]);
        }
        t
    });

    let first = r.samples.first().expect("initial sample");
    let last = r.samples.last().expect("final sample");
    report.evolution = Some(EvolutionSection {
        state: cfg.state.as_str(),
        dt: cfg.dt,
        steps: cfg.steps,
        t_final,
        record_every,
        samples: r.samples.len(),
        max_norm_drift: r.max_norm_drift,
        initial_sides: first.sides.into(),
        final_sides: last.sides.into(),
        max_p_left: max_left,
        max_p_right: max_right,
        oracle_period,
        measured_period,
        max_oracle_deviation: deviation,
    });
    Ok(())
}

fn dephasing(
    cfg: &RunConfig,
    i: Interaction,
    ext: &PointInteraction,
    report: &mut Report,
    artifacts: &mut Artifacts,
) -> Result<(), CliError> {
    let forms = ClosedForms::of(i)?;
    let ham = grid_hamiltonian(cfg, ext, report)?;
    let psi = forms.on_grid(&ham, cfg.state)?;
    let references = forms.references(&ham)?;
    let opts = DephaseOptions {
        ensemble: cfg.ensemble,
        phases: PhaseSource::Uniform { seed: cfg.seed },
        threshold: cfg.threshold,
    };
    let d = dephase(&psi, &references, &opts)?;
    let bound = 2.0 / (cfg.ensemble as f64).sqrt();
    report
        .checks
        .push(CheckEntry::condition("members_invariant", d.members_invariant));
    report
        .checks
        .push(CheckEntry::new("max_kick_deviation", d.max_kick_deviation, KICK_TOL));
    let names = ["even", "odd"];
    for (name, s) in names.iter().zip(&d.references) {
        report
            .checks
            .push(CheckEntry::new(format!("cross_term_{name}"), s.cross_term, bound));
    }

    let layout = Arc::clone(psi.layout());
    artifacts.add(cfg.csv.as_deref(), || {
        let mut t = Table::new(vec!["x", "density"]);
        for (x, p) in layout.positions().iter().zip(&d.mean_density) {
            t.push(vec![*x, *p]);
        }
        t
    });
    report.dephasing = Some(DephasingSection {
        state: cfg.state.as_str(),
        ensemble: d.ensemble,
        threshold: cfg.threshold,
        sides_before: d.sides_before.into(),
        sides_after: d.sides_after.into(),
        members_invariant: d.members_invariant,
        max_kick_deviation: d.max_kick_deviation,
        references: names
            .iter()
            .zip(&d.references)
            .map(|(name, s)| ReferenceEntry {
                reference: name,
                mean_overlap_sq: s.mean_overlap_sq,
                incoherent: s.incoherent,
                cross_term: s.cross_term,
                mean_overlap_abs: s.mean_overlap_abs,
            })
            .collect(),
        coherence: d.coherence,
    });
    Ok(())
}
