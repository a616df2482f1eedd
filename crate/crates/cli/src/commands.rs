//! Implementations of the four subcommands.

use std::time::Instant;

use moshinsky_core::model2e::{
    self, energy_2e, epsilon_closed_2e, epsilon_oracle_2e, single_particle_entropies,
    ModelParams2e, SpinConfig, StateLabel2e,
};
use moshinsky_core::model3e::{
    self, energy_3e, epsilon_closed_3e, epsilon_oracle_3e, epsilon_theta_mixture_3e,
    oracle_rule_3e, ModelParams3e, StateLabel3e, SzSector, SUPPORTED_STATES_3E,
};
use moshinsky_core::perturb::{
    self, build_block_2e, build_block_3e, eigenstate_entanglements, enumerate_level_3e,
    epsilon_mixture, fit_block, fit_block_permuted, haar::MIN_SAMPLES, reference, ChunkStats,
    DegenerateBlock, Excitation, HAAR_STREAMS,
};
use moshinsky_core::quadrature::gauss_hermite;
use moshinsky_core::{linalg::Mat, EntanglementResult, Interaction};

use crate::csvio::{fmt_float, CsvWriter};
use crate::parallel::{ordered_map, resolve_workers};
use crate::{
    BlockArg, EvalArgs, Failure, HaarArgs, InteractionArg, MethodArg, ModelArg, PerturbArgs,
    SpinArg, SweepArgs, VariableArg,
};

/// Residual threshold for declaring a perturbation block reproduced.
const BLOCK_RESIDUAL_TOL: f64 = 1e-9;

fn interaction(arg: InteractionArg) -> Interaction {
    match arg {
        InteractionArg::Attractive => Interaction::Attractive,
        InteractionArg::Repulsive => Interaction::Repulsive,
    }
}

fn spin_config(arg: SpinArg) -> SpinConfig {
    match arg {
        SpinArg::Antiparallel => SpinConfig::Antiparallel,
        SpinArg::Parallel => SpinConfig::Parallel,
    }
}

fn parse_digits(s: &str, what: &str) -> Result<Vec<u32>, Failure> {
    s.chars()
        .map(|ch| {
            ch.to_digit(10)
                .ok_or_else(|| Failure::domain(format!("{what}: `{s}` is not a digit string")))
        })
        .collect()
}

fn parse_state_3e(s: &str) -> Result<StateLabel3e, Failure> {
    let digits = parse_digits(s, "3e state")?;
    if digits.len() != 3 {
        return Err(Failure::domain(format!(
            "3e state must be three digits like 010, got `{s}`"
        )));
    }
    Ok(StateLabel3e::new(
        digits[0],
        digits[1],
        digits[2],
        SzSector::PlusHalf,
    ))
}

fn parse_state_2e(s: &str, spin: SpinConfig) -> Result<StateLabel2e, Failure> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(Failure::domain(format!(
            "2e state must be two digit triples like 100,000, got `{s}`"
        )));
    }
    let cm = parse_digits(parts[0], "2e state")?;
    let rel = parse_digits(parts[1], "2e state")?;
    if cm.len() != 3 || rel.len() != 3 {
        return Err(Failure::domain(format!(
            "each 2e sector needs exactly three digits, got `{s}`"
        )));
    }
    Ok(StateLabel2e::new(
        cm[0],
        cm[1] as i32,
        cm[2],
        rel[0],
        rel[1] as i32,
        rel[2],
        spin,
    )?)
}

fn state_name_3e(state: &StateLabel3e) -> String {
    format!("{}{}{}", state.n1, state.n2, state.n3)
}

// Colon separator: the name must stay a single CSV field.
fn state_name_2e(state: &StateLabel2e) -> String {
    let (a, b, c) = state.cm();
    let (d, e, f) = state.rel();
    let spin = match state.spin() {
        SpinConfig::Antiparallel => "a",
        SpinConfig::Parallel => "p",
    };
    format!("{a}{b}{c}:{d}{e}{f}{spin}")
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

pub fn eval(args: &EvalArgs) -> Result<(), Failure> {
    let start = Instant::now();
    let sign = interaction(args.interaction);
    match args.model {
        ModelArg::ThreeElectron => {
            let state = parse_state_3e(&args.state)?;
            let params = ModelParams3e::new(args.omega, args.tau * args.omega, sign)?;
            println!(
                "eval 3e |{}> tau={} omega={} interaction={:?}",
                state_name_3e(&state),
                fmt_float(params.tau()),
                fmt_float(params.omega()),
                sign
            );
            let energy = energy_3e(&state, &params);
            let closed = match args.method {
                MethodArg::Closed | MethodArg::Both => {
                    let eps = epsilon_closed_3e(&state, &params)?;
                    println!("epsilon (closed) = {}", fmt_float(eps));
                    Some(eps)
                }
                MethodArg::Oracle => None,
            };
            if matches!(args.method, MethodArg::Oracle | MethodArg::Both) {
                let order = args.order.unwrap_or(model3e::DEFAULT_ORACLE_ORDER_3E);
                let rule = oracle_rule_3e(&params, order)?;
                let result = epsilon_oracle_3e(&state, &params, &rule)?;
                print_oracle(&result);
                if let Some(c) = closed {
                    println!(
                        "|closed - oracle| = {}",
                        fmt_float((c - result.epsilon).abs())
                    );
                }
            }
            println!("energy = {}", fmt_float(energy));
        }
        ModelArg::TwoElectron => {
            let state = parse_state_2e(&args.state, spin_config(args.spin))?;
            let params = ModelParams2e::new(
                args.omega,
                args.tau * args.omega,
                args.sigma * args.omega,
                sign,
            )?;
            println!(
                "eval 2e |{}> tau={} sigma={} omega={} interaction={:?}",
                state_name_2e(&state),
                fmt_float(params.tau()),
                fmt_float(params.sigma()),
                fmt_float(params.omega()),
                sign
            );
            let energy = energy_2e(&state, &params);
            let closed = match args.method {
                MethodArg::Closed | MethodArg::Both => {
                    let eps = epsilon_closed_2e(&state, &params)?;
                    println!("epsilon (closed) = {}", fmt_float(eps));
                    Some(eps)
                }
                MethodArg::Oracle => None,
            };
            if matches!(args.method, MethodArg::Oracle | MethodArg::Both) {
                let order = args.order.unwrap_or(model2e::DEFAULT_ORACLE_ORDER_2E);
                let rule = gauss_hermite(order, 1.0)?;
                let result = epsilon_oracle_2e(&state, &params, &rule)?;
                print_oracle(&result);
                if let Some(c) = closed {
                    println!(
                        "|closed - oracle| = {}",
                        fmt_float((c - result.epsilon).abs())
                    );
                }
            }
            println!("energy = {}", fmt_float(energy));
        }
    }
    println!("wall time = {:.3} s", start.elapsed().as_secs_f64());
    Ok(())
}

fn print_oracle(result: &EntanglementResult) {
    println!("epsilon (oracle) = {}", fmt_float(result.epsilon));
    if let Some(conv) = result.convergence {
        println!("oracle convergence estimate = {}", fmt_float(conv));
    }
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

struct Row {
    fields: Vec<String>,
    convergence: Option<f64>,
}

pub fn sweep(args: &SweepArgs) -> Result<(), Failure> {
    let start_time = Instant::now();
    if args.start.is_nan() || args.stop.is_nan() || args.start >= args.stop {
        return Err(Failure::domain(format!(
            "sweep range must satisfy start < stop, got [{}, {}]",
            args.start, args.stop
        )));
    }
    if args.points < 2 {
        return Err(Failure::domain(format!(
            "need at least 2 points, got {}",
            args.points
        )));
    }
    if args.method == MethodArg::Both {
        return Err(Failure::domain(
            "sweep supports --method closed or oracle; use eval for both".into(),
        ));
    }
    let grid: Vec<f64> = (0..args.points)
        .map(|i| args.start + (args.stop - args.start) * i as f64 / (args.points - 1) as f64)
        .collect();
    let workers = resolve_workers(args.workers);

    // One job per output row; rows are ordered by (point, state).
    let (header, jobs): (&str, Jobs) = build_sweep_jobs(args, &grid)?;

    let results = ordered_map(jobs.len(), workers, |i| jobs[i]());
    let mut rows = Vec::with_capacity(results.len());
    let mut worst_convergence: Option<f64> = None;
    for r in results {
        let row = r?;
        if let Some(c) = row.convergence {
            worst_convergence = Some(worst_convergence.map_or(c, |w: f64| w.max(c)));
        }
        rows.push(row.fields);
    }

    let writer = CsvWriter::create(&args.out, header)?;
    let mut writer = writer;
    for fields in &rows {
        if let Err(failure) = writer.row(fields) {
            writer.discard();
            return Err(failure);
        }
    }
    let count = writer.finish()?;

    println!(
        "sweep variable={:?} range=[{}, {}] points={} workers={workers}",
        variable_name(args.variable),
        fmt_float(args.start),
        fmt_float(args.stop),
        args.points
    );
    println!("wrote {count} rows to {}", args.out.display());
    if let Some(c) = worst_convergence {
        println!("worst oracle convergence estimate = {}", fmt_float(c));
    }
    println!("wall time = {:.3} s", start_time.elapsed().as_secs_f64());
    Ok(())
}

fn variable_name(v: VariableArg) -> &'static str {
    match v {
        VariableArg::Tau => "tau",
        VariableArg::Sigma => "sigma",
        VariableArg::Theta => "theta",
        VariableArg::P => "p",
        VariableArg::B => "b",
    }
}

type Jobs = Vec<Box<dyn Fn() -> Result<Row, Failure> + Send + Sync>>;

fn build_sweep_jobs(args: &SweepArgs, grid: &[f64]) -> Result<(&'static str, Jobs), Failure> {
    let sign = interaction(args.interaction);
    let mut jobs: Jobs = Vec::new();
    match args.variable {
        VariableArg::Tau | VariableArg::Sigma => {
            let model = args
                .model
                .ok_or_else(|| Failure::domain("tau/sigma sweeps need --model".into()))?;
            if args.variable == VariableArg::Sigma && model == ModelArg::ThreeElectron {
                return Err(Failure::domain(
                    "sigma sweeps apply to the 2e model only".into(),
                ));
            }
            match model {
                ModelArg::ThreeElectron => {
                    let states = states_3e(args)?;
                    for &x in grid {
                        for &state in &states {
                            let (omega, order, method) = (args.omega, args.order, args.method);
                            jobs.push(Box::new(move || {
                                let params = ModelParams3e::new(omega, x * omega, sign)?;
                                let eps = match method {
                                    MethodArg::Closed => EntanglementResult::closed(
                                        epsilon_closed_3e(&state, &params)?,
                                    ),
                                    _ => {
                                        let rule = oracle_rule_3e(
                                            &params,
                                            order.unwrap_or(model3e::DEFAULT_ORACLE_ORDER_3E),
                                        )?;
                                        epsilon_oracle_3e(&state, &params, &rule)?
                                    }
                                };
                                Ok(Row {
                                    fields: vec![
                                        fmt_float(x),
                                        state_name_3e(&state),
                                        fmt_float(eps.epsilon),
                                        fmt_float(energy_3e(&state, &params)),
                                    ],
                                    convergence: eps.convergence,
                                })
                            }));
                        }
                    }
                }
                ModelArg::TwoElectron => {
                    let states = states_2e(args)?;
                    for &x in grid {
                        for &state in &states {
                            let (omega, order, method) = (args.omega, args.order, args.method);
                            let (tau_fix, sigma_fix, variable) =
                                (args.tau, args.sigma, args.variable);
                            jobs.push(Box::new(move || {
                                let (tau, sigma) = match variable {
                                    VariableArg::Tau => (x, sigma_fix),
                                    _ => (tau_fix, x),
                                };
                                let params =
                                    ModelParams2e::new(omega, tau * omega, sigma * omega, sign)?;
                                let eps = match method {
                                    MethodArg::Closed => EntanglementResult::closed(
                                        epsilon_closed_2e(&state, &params)?,
                                    ),
                                    _ => {
                                        let rule = gauss_hermite(
                                            order.unwrap_or(model2e::DEFAULT_ORACLE_ORDER_2E),
                                            1.0,
                                        )?;
                                        epsilon_oracle_2e(&state, &params, &rule)?
                                    }
                                };
                                Ok(Row {
                                    fields: vec![
                                        fmt_float(x),
                                        state_name_2e(&state),
                                        fmt_float(eps.epsilon),
                                        fmt_float(energy_2e(&state, &params)),
                                    ],
                                    convergence: eps.convergence,
                                })
                            }));
                        }
                    }
                }
            }
            Ok(("var,state,epsilon,energy", jobs))
        }
        VariableArg::Theta => {
            if args.model != Some(ModelArg::ThreeElectron) {
                return Err(Failure::domain(
                    "theta sweeps apply to the 3e model only".into(),
                ));
            }
            let states = if args.states.is_empty() {
                vec![parse_state_3e("011")?, parse_state_3e("110")?]
            } else {
                args.states
                    .iter()
                    .map(|s| parse_state_3e(s))
                    .collect::<Result<_, _>>()?
            };
            for &x in grid {
                for &state in &states {
                    let (omega, tau, order) = (args.omega, args.tau, args.order);
                    jobs.push(Box::new(move || {
                        let params = ModelParams3e::new(omega, tau * omega, sign)?;
                        let rule = oracle_rule_3e(
                            &params,
                            order.unwrap_or(model3e::DEFAULT_ORACLE_ORDER_3E),
                        )?;
                        let eps = epsilon_theta_mixture_3e(&state, x, &params, &rule)?;
                        Ok(Row {
                            fields: vec![
                                fmt_float(x),
                                state_name_3e(&state),
                                fmt_float(eps),
                                fmt_float(energy_3e(&state, &params)),
                            ],
                            convergence: None,
                        })
                    }));
                }
            }
            Ok(("var,state,epsilon,energy", jobs))
        }
        VariableArg::P => {
            for &x in grid {
                jobs.push(Box::new(move || {
                    Ok(Row {
                        fields: vec![
                            fmt_float(x),
                            "mixture".to_string(),
                            fmt_float(epsilon_mixture(x)?),
                        ],
                        convergence: None,
                    })
                }));
            }
            Ok(("var,state,epsilon", jobs))
        }
        VariableArg::B => {
            for &x in grid {
                let omega = args.omega;
                jobs.push(Box::new(move || {
                    let (s_l, _) = single_particle_entropies(omega, x * omega)?;
                    Ok(Row {
                        fields: vec![fmt_float(x), "S_L".to_string(), fmt_float(s_l)],
                        convergence: None,
                    })
                }));
                jobs.push(Box::new(move || {
                    let (_, s_vn) = single_particle_entropies(omega, x * omega)?;
                    Ok(Row {
                        fields: vec![fmt_float(x), "S_vN".to_string(), fmt_float(s_vn)],
                        convergence: None,
                    })
                }));
            }
            Ok(("var,state,epsilon", jobs))
        }
    }
}

fn states_3e(args: &SweepArgs) -> Result<Vec<StateLabel3e>, Failure> {
    if args.states.is_empty() {
        Ok(SUPPORTED_STATES_3E
            .iter()
            .map(|&(n1, n2, n3)| StateLabel3e::new(n1, n2, n3, SzSector::PlusHalf))
            .collect())
    } else {
        args.states.iter().map(|s| parse_state_3e(s)).collect()
    }
}

fn states_2e(args: &SweepArgs) -> Result<Vec<StateLabel2e>, Failure> {
    let spin = spin_config(args.spin);
    if args.states.is_empty() {
        if spin == SpinConfig::Parallel {
            // The only supported state that admits aligned spins.
            return Ok(vec![parse_state_2e("000,001", spin)?]);
        }
        return Ok(vec![
            parse_state_2e("000,000", spin)?,
            parse_state_2e("100,000", spin)?,
            parse_state_2e("000,100", spin)?,
            parse_state_2e("001,000", spin)?,
            parse_state_2e("000,001", spin)?,
        ]);
    }
    // The comma inside a 2e label collides with the list delimiter, so the
    // flag arrives pre-split into digit triples: re-pair adjacent tokens.
    if args.states.len() % 2 != 0 {
        return Err(Failure::domain(format!(
            "2e state list must pair digit triples like 000,000,100,000; got {:?}",
            args.states
        )));
    }
    args.states
        .chunks(2)
        .map(|pair| parse_state_2e(&format!("{},{}", pair[0], pair[1]), spin))
        .collect()
}

// ---------------------------------------------------------------------------
// perturb
// ---------------------------------------------------------------------------

pub fn perturb(args: &PerturbArgs) -> Result<(), Failure> {
    let start = Instant::now();
    let omega = args.omega;
    let b = args.sigma * omega;
    if omega.is_nan() || omega <= 0.0 {
        return Err(Failure::domain(format!(
            "trap frequency must be positive, got {omega}"
        )));
    }

    match args.block {
        BlockArg::ThreeEFirst => {
            let basis = enumerate_level_3e(Excitation::First);
            let names = basis.iter().map(det_name_1d).collect();
            let block = build_block_3e(&basis, omega)?;
            let eps = eigenstate_entanglements(&block, &basis, 3)?;
            finish_perturb(
                "3e-first",
                block,
                reference::block_3e_first(),
                eps,
                names,
                false,
                start,
            )
        }
        BlockArg::ThreeESecond => {
            let basis = enumerate_level_3e(Excitation::Second);
            let names = basis.iter().map(det_name_1d).collect();
            let block = build_block_3e(&basis, omega)?;
            let eps = eigenstate_entanglements(&block, &basis, 3)?;
            finish_perturb(
                "3e-second",
                block,
                reference::block_3e_second(),
                eps,
                names,
                true,
                start,
            )
        }
        BlockArg::TwoENumr => {
            let basis = perturb::level_2e_xy_excited();
            let names = basis.iter().map(det_name_2e).collect();
            let block = build_block_2e(&basis, omega, b)?;
            let c1 = reference::c1_xy(omega, b);
            let c2 = block.matrix[(1, 5)];
            let reference_matrix = reference::block_2e_xy(c1, c2);
            let eps = eigenstate_entanglements(&block, &basis, 2)?;
            finish_perturb("2e-numr", block, reference_matrix, eps, names, false, start)
        }
        BlockArg::TwoENur => {
            let basis = perturb::level_2e_z_excited();
            let names = basis.iter().map(det_name_2e).collect();
            let block = build_block_2e(&basis, omega, b)?;
            let reference_matrix =
                reference::block_2e_z(reference::d1_z(omega, b), reference::d2_z(omega));
            let eps = eigenstate_entanglements(&block, &basis, 2)?;
            finish_perturb("2e-nur", block, reference_matrix, eps, names, false, start)
        }
    }
}

fn det_name_1d(det: &perturb::SlaterDeterminant<perturb::OrbitalIndex1D>) -> String {
    let orbs: Vec<String> = det
        .orbitals()
        .iter()
        .map(|o| {
            format!(
                "{}{}",
                o.n,
                if o.spin == moshinsky_core::Spin::Up {
                    "+"
                } else {
                    "-"
                }
            )
        })
        .collect();
    format!("|{}|", orbs.join(","))
}

fn det_name_2e(det: &perturb::SlaterDeterminant<perturb::Orbital2e>) -> String {
    let orbs: Vec<String> = det
        .orbitals()
        .iter()
        .map(|o| {
            format!(
                "({},{},{}){}",
                o.nu,
                o.m,
                o.n,
                if o.spin == moshinsky_core::Spin::Up {
                    "+"
                } else {
                    "-"
                }
            )
        })
        .collect();
    format!("|{}|", orbs.join(","))
}

fn print_matrix(label: &str, m: &Mat) {
    println!("{label}:");
    for i in 0..m.rows() {
        let row: Vec<String> = (0..m.cols())
            .map(|j| format!("{:+.6}", m[(i, j)]))
            .collect();
        println!("  [{}]", row.join(", "));
    }
}

fn finish_perturb(
    name: &str,
    block: DegenerateBlock,
    reference_matrix: Mat,
    eps: Vec<f64>,
    basis_names: Vec<String>,
    permuted: bool,
    start: Instant,
) -> Result<(), Failure> {
    println!("perturbation block {name}");
    println!("basis ({} determinants):", basis_names.len());
    for (i, n) in basis_names.iter().enumerate() {
        println!("  {i}: {n}");
    }
    println!(
        "unperturbed energy = {}",
        fmt_float(block.unperturbed_energy)
    );

    let fit = if permuted {
        let (perm, fit) = fit_block_permuted(&block.matrix, &reference_matrix);
        println!("basis permutation against reference: {perm:?}");
        fit
    } else {
        fit_block(&block.matrix, &reference_matrix)
    };
    println!(
        "reference fit: scale = {}, shift = {}, residual = {}",
        fmt_float(fit.scale),
        fmt_float(fit.shift),
        fmt_float(fit.residual)
    );

    println!("eigenvalues (ascending, clusters bracketed):");
    for &(lo, hi) in &block.clusters {
        let vals: Vec<String> = (lo..hi).map(|i| fmt_float(block.eigenvalues[i])).collect();
        println!("  [{}]", vals.join(", "));
    }
    println!("eigenstate entanglement (eigenvalue order):");
    for (i, e) in eps.iter().enumerate() {
        println!("  {i}: {}", fmt_float(*e));
    }
    println!("wall time = {:.3} s", start.elapsed().as_secs_f64());

    if fit.residual.is_nan() || fit.residual >= BLOCK_RESIDUAL_TOL || fit.scale <= 0.0 {
        print_matrix("computed block", &block.matrix);
        print_matrix("reference block", &reference_matrix);
        return Err(Failure::convergence(format!(
            "block {name} does not reproduce the reference: residual {:.3e}",
            fit.residual
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// haar
// ---------------------------------------------------------------------------

pub fn haar(args: &HaarArgs) -> Result<(), Failure> {
    let start = Instant::now();
    if args.samples < MIN_SAMPLES {
        return Err(Failure::domain(format!(
            "need at least {MIN_SAMPLES} samples for stable statistics, got {}",
            args.samples
        )));
    }
    let workers = resolve_workers(args.workers);
    // Fixed stream split: the merged result is identical at any worker
    // count.
    let chunks: Vec<ChunkStats> = ordered_map(HAAR_STREAMS as usize, workers, |c| {
        perturb::haar::sample_chunk(
            args.seed,
            c as u64,
            perturb::haar::chunk_len(args.samples, c as u64),
        )
    });
    let stats = perturb::haar::merge_chunks(args.samples, &chunks);

    let fractions = stats.bin_fractions();
    let edges = [
        (0.0, 1.0 / 9.0),
        (1.0 / 9.0, 2.0 / 9.0),
        (2.0 / 9.0, 1.0 / 3.0),
    ];
    println!(
        "haar samples={} seed={} workers={workers}",
        stats.samples, args.seed
    );
    for k in 0..3 {
        println!(
            "bin ({}, {}]: fraction = {} ({} samples)",
            fmt_float(edges[k].0),
            fmt_float(edges[k].1),
            fmt_float(fractions[k]),
            stats.bin_counts[k]
        );
    }
    println!("mean = {}", fmt_float(stats.mean));
    println!("max = {}", fmt_float(stats.max));

    if let Some(path) = &args.out {
        let mut writer = CsvWriter::create(path, "bin_lo,bin_hi,count,fraction")?;
        for k in 0..3 {
            let fields = vec![
                fmt_float(edges[k].0),
                fmt_float(edges[k].1),
                stats.bin_counts[k].to_string(),
                fmt_float(fractions[k]),
            ];
            if let Err(failure) = writer.row(&fields) {
                writer.discard();
                return Err(failure);
            }
        }
        let rows = writer.finish()?;
        println!("wrote {rows} rows to {}", path.display());
    }
    println!("wall time = {:.3} s", start.elapsed().as_secs_f64());
    Ok(())
}
