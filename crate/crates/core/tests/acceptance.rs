//! Acceptance checks, one line per criterion. Runs without the libtest
//! harness so the PASS/FAIL lines always reach stdout.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use halving_core::chbuild::gadget::GadgetScene;
use halving_core::chbuild::{
    build_instance, build_instance_3block, default_epsilon, AgentKind, CHInstance, Part, Variant,
};
use halving_core::chsolve::{decode, find_plan, roundtrip, synthesize, verify};
use halving_core::circuit::{
    build_lambda_hat, eval_circuit, mask_to_signs, phi, BitMatrix, GateKind, StrongLabelTable,
};
use halving_core::numeric::{q, signed_value, CutSet, Rational};
use halving_core::snake::{fold, map_solution_back, pad_width, pipeline_to_width8, to_tucker_pair};
use halving_core::tucker::{
    check_antipodality, covers, enumerate_strong_solutions, lemma_r_to_n, linf,
    map_2dtucker_to_strong, random_antipodal_instance, random_tucker2d, verify_strong_solution,
    Label, StrongTuckerInstance,
};

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

/// λ(p)_i = + iff p_i ≥ 5.
fn threshold_table(n: usize) -> StrongLabelTable {
    let labels = (0..8usize.pow(n as u32))
        .map(|mut idx| {
            let mut mask = 0u64;
            for i in (0..n).rev() {
                if idx % 8 + 1 >= 5 {
                    mask |= 1 << i;
                }
                idx /= 8;
            }
            mask
        })
        .collect();
    StrongLabelTable::new(vec![8; n], labels).unwrap()
}

fn offsets(scene: &GadgetScene) -> Vec<Rational> {
    let steps = (scene.span_len() * q(64, 1)).floor();
    let steps: usize = steps.try_into().unwrap();
    (0..=steps).map(|j| q(j as i64, 64)).collect()
}

fn input_combos(arity: usize) -> Vec<Vec<i8>> {
    match arity {
        1 => vec![vec![1], vec![-1]],
        _ => vec![vec![1, 1], vec![1, -1], vec![-1, 1], vec![-1, -1]],
    }
}

/// Sweeps every input combination, entering sign and 1/64 offset.
/// `expect(values, entering)` is the required output whenever the
/// discrepancy is within ε. Returns (zero offsets per combination, no-cut
/// discrepancies).
fn sweep(
    scene: &GadgetScene,
    eps: &Rational,
    expect: impl Fn(&[i8], i8) -> i8,
) -> Result<(Vec<Vec<Rational>>, Vec<Rational>), String> {
    let offs = offsets(scene);
    let mut zeros = Vec::new();
    let mut no_cut = Vec::new();
    for values in input_combos(scene.inputs.len()) {
        for entering in [1i8, -1] {
            let want = expect(&values, entering);
            let mut z = Vec::new();
            for o in &offs {
                let out = scene
                    .evaluate(&values, entering, Some(o))
                    .map_err(|e| e.to_string())?;
                if out.discrepancy <= *eps {
                    ensure!(
                        out.output == Some(want),
                        "inputs {values:?}, entering {entering}, offset {o}: output {:?}, want {want}",
                        out.output
                    );
                }
                if out.discrepancy.is_zero() {
                    z.push(o.clone());
                }
            }
            zeros.push(z);
            no_cut.push(
                scene
                    .evaluate(&values, entering, None)
                    .map_err(|e| e.to_string())?
                    .discrepancy,
            );
        }
    }
    Ok((zeros, no_cut))
}

fn nand(a: i8, b: i8) -> i8 {
    if a == 1 && b == 1 {
        -1
    } else {
        1
    }
}

/// s = +: NAND(a, b); s = −: −NAND(−a, −b).
fn nand_table(v: &[i8], s: i8) -> i8 {
    if s == 1 {
        nand(v[0], v[1])
    } else {
        -nand(-v[0], -v[1])
    }
}

/// Each combination has exactly one zero, at 1/2 into ℓ or into r.
fn zeros_at_half(zeros: &[Vec<Rational>]) -> Result<(), String> {
    for z in zeros {
        ensure!(
            z.len() == 1 && (z[0] == q(1, 2) || z[0] == q(5, 2)),
            "zero offsets {z:?}"
        );
    }
    Ok(())
}

fn min_of(v: &[Rational]) -> Rational {
    v.iter().min().cloned().unwrap()
}

fn c1_not_sweep() -> Check {
    let eps = default_epsilon();
    let scene = GadgetScene::not_gate();
    ensure!(offsets(&scene).len() == 193, "expected 193 offsets");
    let (zeros, no_cut) = sweep(&scene, &eps, |v, _| -v[0])?;
    zeros_at_half(&zeros)?;
    let min = min_of(&no_cut);
    ensure!(min == q(1, 3), "no-cut discrepancies {no_cut:?}");
    Ok(format!(
        "4 combos x 193 offsets, zeros at 1/2 of l or r, no-cut min = {min}"
    ))
}

fn c2_nand_sweep() -> Check {
    let eps = default_epsilon();
    let scene = GadgetScene::nand_gate();
    ensure!(offsets(&scene).len() == 193, "expected 193 offsets");
    let (_, no_cut) = sweep(&scene, &eps, nand_table)?;
    let min = min_of(&no_cut);
    ensure!(min == q(1, 5), "no-cut minimum {min}");
    // At ε = 1/5 some configuration without a gadget cut is already balanced.
    let boundary = q(1, 5);
    ensure!(no_cut.iter().any(|d| *d <= boundary), "no boundary witness");
    ensure!(no_cut.iter().all(|d| *d > eps), "a no-cut case is within ε");
    Ok(format!(
        "8 combos x 193 offsets, no-cut min = {min}, witness at eps = 1/5"
    ))
}

fn c3_phi() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for code in 0u32..128 {
        let bits: Vec<bool> = (0..7).map(|j| code >> j & 1 == 1).collect();
        let x = BitMatrix::new(1, bits).map_err(|e| e.to_string())?;
        let p = phi(&x)[0];
        ensure!((1..=8).contains(&p), "phi = {p}");
        ensure!(
            phi(&x.negated())[0] == 9 - p,
            "antipodal symmetry fails at {code}"
        );
        for j in 0..7 {
            let mut y = x.clone();
            y.flip(0, j);
            ensure!(
                phi(&y)[0].abs_diff(p) <= 1,
                "single flip moves phi by more than 1"
            );
        }
    }
    for n in [2usize, 3] {
        for _ in 0..10_000 {
            let x = BitMatrix::random(n, &mut rng);
            let mut y = x.clone();
            for i in 0..n {
                let flips = rng.gen_range(0..=n);
                for _ in 0..flips {
                    y.flip(i, rng.gen_range(0..7 * n));
                }
            }
            ensure!(
                linf(&phi(&x), &phi(&y)) <= 1,
                "n={n}: phi jumped by more than 1"
            );
        }
    }
    Ok("N=1 exhaustive, N=2,3 with 10^4 trials each".into())
}

fn c4_lambda_hat() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let n = 2;
    let labels: Vec<u64> = (0..64).map(|_| rng.gen_range(0..4)).collect();
    let table = StrongLabelTable::new(vec![8, 8], labels).map_err(|e| e.to_string())?;
    let c = build_lambda_hat(&table).map_err(|e| e.to_string())?;
    ensure!(
        c.gates()
            .iter()
            .all(|g| matches!(g.kind, GateKind::Not | GateKind::Nand)),
        "foreign gate kind"
    );
    ensure!(
        c.output_gate(0) == c.m() - n,
        "outputs are not the last gates"
    );
    for _ in 0..1000 {
        let x = BitMatrix::random(n, &mut rng);
        let got = eval_circuit(&c, &x).map_err(|e| e.to_string())?;
        let all = c.eval_all(&x).map_err(|e| e.to_string())?;
        let tail: Vec<i8> = all[c.m() - n..]
            .iter()
            .map(|&b| if b { 1 } else { -1 })
            .collect();
        ensure!(got == tail, "outputs differ from the last gates");
        ensure!(
            got == mask_to_signs(table.get(&phi(&x)), n),
            "circuit disagrees with lambda"
        );
    }
    Ok(format!("m = {}, 10^3 inputs", c.m()))
}

fn back_to(
    pre: &StrongTuckerInstance,
    sol: &halving_core::tucker::StrongSolution,
) -> Result<bool, String> {
    verify_strong_solution(pre, sol).map_err(|e| e.to_string())
}

fn c5_snake() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut mapped = 0usize;
    for seed in 0..50u64 {
        let dims = [rng.gen_range(10..=16), rng.gen_range(10..=16)];
        let inst = random_antipodal_instance(&dims, seed).map_err(|e| e.to_string())?;
        let dim = if dims[1] > dims[0] { 1 } else { 0 };
        let (padded, pad_rec) = pad_width(&inst, dim).map_err(|e| e.to_string())?;
        let (folded, fold_rec) = fold(&padded, dim).map_err(|e| e.to_string())?;
        ensure!(
            check_antipodality(&folded).0,
            "seed {seed}: folded instance not antipodal"
        );
        for sol in enumerate_strong_solutions(&folded) {
            let mid = map_solution_back(&fold_rec, &padded, &sol)
                .map_err(|e| format!("seed {seed}: {e}"))?;
            let back = map_solution_back(&pad_rec, &inst, &mid).map_err(|e| e.to_string())?;
            ensure!(
                back_to(&inst, &back)?,
                "seed {seed}: {:?} maps to an invalid solution",
                sol.points
            );
            mapped += 1;
        }
    }

    let t = random_tucker2d(16, 5).map_err(|e| e.to_string())?;
    let (fin, pipe) = pipeline_to_width8(&t).map_err(|e| e.to_string())?;
    ensure!(
        fin.dims().iter().all(|&w| w == 8),
        "final widths {:?}",
        fin.dims()
    );
    let start = map_2dtucker_to_strong(&t);
    let stages = pipe.replay(&start).map_err(|e| e.to_string())?;
    ensure!(
        stages.iter().all(|s| check_antipodality(s).0),
        "a pipeline stage is not antipodal"
    );
    let sol = enumerate_strong_solutions(&fin)
        .next()
        .ok_or("final instance has no solution")?;
    let back = pipe.map_back(&start, &sol).map_err(|e| e.to_string())?;
    let pair = to_tucker_pair(&back).map_err(|e| e.to_string())?;
    ensure!(
        t.is_solution(&pair),
        "pipeline pair {pair:?} is not a Tucker solution"
    );
    Ok(format!(
        "{mapped} folded solutions mapped back, pipeline of {} stages",
        stages.len() - 1
    ))
}

fn standard_roundtrip(table: &StrongLabelTable) -> Result<usize, String> {
    let n = table.n();
    let r = roundtrip(table, Variant::Standard, &default_epsilon()).map_err(|e| e.to_string())?;
    let m = r.gates;
    ensure!(
        r.num_agents == 6 * n * m + n,
        "N={n}: agent count {}",
        r.num_agents
    );
    ensure!(r.verification.ok, "N={n}: verification failed");
    ensure!(
        r.verification.max_discrepancy.is_zero(),
        "N={n}: max discrepancy {}",
        r.verification.max_discrepancy
    );
    ensure!(
        r.decode.good == (0..3 * n).collect::<Vec<_>>(),
        "N={n}: G = {:?}",
        r.decode.good
    );
    ensure!(
        r.decode.phi_close,
        "N={n}: decoded points are not pairwise close"
    );
    ensure!(r.solution_valid, "N={n}: decoded solution invalid");
    Ok(m)
}

fn c6_standard_roundtrip() -> Check {
    let m = standard_roundtrip(&threshold_table(2))?;
    // A folded Tucker instance gives a circuit in the thousands of gates.
    let t = random_tucker2d(16, 1).map_err(|e| e.to_string())?;
    let (folded, _) = pipeline_to_width8(&t).map_err(|e| e.to_string())?;
    let big = standard_roundtrip(&folded.label_table())?;
    Ok(format!(
        "N=2: m = {m}, all discrepancies 0; folded N=4: m = {big}, all discrepancies 0"
    ))
}

/// Cut set on `inst` making each given unit cell pure with the given sign,
/// with sign + to the right of the last cell. Cells must be consecutive.
fn cells_to_cuts(inst: &CHInstance, start: &Rational, signs: &[i8]) -> CutSet {
    let unit = &inst.layout.unit;
    let mut cuts = Vec::new();
    let mut next = 1i8;
    for (u, &s) in signs.iter().enumerate().rev() {
        if s != next {
            cuts.push(start + &(unit * &q(u as i64 + 1, 1)));
        }
        next = s;
    }
    CutSet::from_unsorted(cuts, inst.layout.ambient()).unwrap()
}

fn c7_three_block() -> Check {
    let eps = default_epsilon();
    let n = 2;
    let circuit = build_lambda_hat(&threshold_table(n)).map_err(|e| e.to_string())?;
    let inst = build_instance_3block(&circuit, &eps).map_err(|e| e.to_string())?;
    for (idx, a) in inst.agents.iter().enumerate() {
        ensure!(
            a.density.is_three_block_uniform(),
            "agent {idx} is not 3-block uniform"
        );
        ensure!(
            a.density.total_mass() == q(1, 1),
            "agent {idx} has mass {}",
            a.density.total_mass()
        );
    }

    let scene = GadgetScene::nand_gate_3block(&eps);
    let (_, no_cut) = sweep(&scene, &eps, nand_table)?;
    let nand_min = min_of(&no_cut);
    ensure!(nand_min > eps, "3-block NAND balanced without a cut");
    let scene = GadgetScene::not_follower(&eps);
    let (zeros, no_cut) = sweep(&scene, &eps, |v, _| -v[0])?;
    zeros_at_half(&zeros)?;
    ensure!(
        min_of(&no_cut) == q(1, 3),
        "follower no-cut minimum {}",
        min_of(&no_cut)
    );
    let scene = GadgetScene::output_copy();
    let (_, no_cut) = sweep(&scene, &eps, |v, _| -v[0])?;
    let copy_min = min_of(&no_cut);
    ensure!(copy_min > eps, "output copy balanced without a cut");

    let r = roundtrip(&threshold_table(n), Variant::ThreeBlock, &eps).map_err(|e| e.to_string())?;
    ensure!(
        r.verification.ok && r.solution_valid,
        "3-block roundtrip failed"
    );
    ensure!(r.decode.phi_close, "3-block decoded points are not close");

    // 19N copies read (−,+,+) and N copies all −, so every pure output
    // agrees; the feedback agent still sees 4/15.
    let kk = inst.layout.copies;
    let mut signs = Vec::with_capacity(3 * kk);
    for k in 0..kk {
        signs.extend_from_slice(if k < 19 * n {
            &[-1, 1, 1]
        } else {
            &[-1, -1, -1]
        });
    }
    let start = inst.layout.output(0, 0, Part::L).lo;
    let cuts = cells_to_cuts(&inst, &start, &signs);
    let fb = &inst.agents[inst.feedback_agent(0)];
    ensure!(fb.kind == AgentKind::Feedback, "agent kind {:?}", fb.kind);
    let d = signed_value(&fb.density, &cuts)
        .map_err(|e| e.to_string())?
        .abs();
    ensure!(d == q(4, 15) && d > eps, "feedback discrepancy {d}");
    Ok(format!(
        "{} agents, no-cut min NAND {nand_min} / copy {copy_min}, roundtrip m = {}, feedback witness = {d}",
        inst.num_agents(),
        r.gates
    ))
}

fn c8_negative_controls() -> Check {
    let eps = default_epsilon();
    let table = threshold_table(2);
    let circuit = build_lambda_hat(&table).map_err(|e| e.to_string())?;
    let inst = build_instance(&circuit, &eps).map_err(|e| e.to_string())?;
    let plan = find_plan(&table, &inst.layout).map_err(|e| e.to_string())?;
    let cuts = synthesize(&inst, &plan).map_err(|e| e.to_string())?;
    let l = &inst.layout;

    let (k, t) = (1, l.m / 2);
    let aux = l.gate(k, t, Part::A);
    let idx = cuts
        .cuts()
        .iter()
        .position(|c| aux.interior_contains(c))
        .ok_or("no aux cut")?;
    let fewer = cuts.without(idx);
    let a = &inst.agents[inst.aux_agent(k, t)];
    let d = signed_value(&a.density, &fewer)
        .map_err(|e| e.to_string())?
        .abs();
    ensure!(d == q(1, 1), "aux discrepancy after deletion {d}");

    let span = l.gate_span(k, t);
    let idx = cuts
        .cuts()
        .iter()
        .position(|c| span.interior_contains(c))
        .ok_or("no gate cut")?;
    let mut moved = cuts.cuts().to_vec();
    moved[idx] = &moved[idx] + &(&q(1, 2) * &l.unit);
    let moved = CutSet::new(moved, l.ambient()).map_err(|e| e.to_string())?;
    let rep = verify(&inst, &moved).map_err(|e| e.to_string())?;
    ensure!(!rep.violations.is_empty(), "moved gate cut still within ε");

    let dec = decode(&inst, &cuts).map_err(|e| e.to_string())?;
    let mut tucker = StrongTuckerInstance::new(table.dims.clone(), table.labels.clone())
        .map_err(|e| e.to_string())?;
    ensure!(
        back_to(&tucker, &dec.solution)?,
        "decoded solution invalid before tampering"
    );
    let p = dec.solution.points[0].clone();
    let flipped: Label = tucker.label(&p) ^ 1;
    tucker.set_label(&p, flipped);
    ensure!(
        !back_to(&tucker, &dec.solution)?,
        "tampered label still verifies"
    );
    Ok(format!(
        "aux -> {d}, moved cut -> {} violations, tampered label rejected",
        rep.violations.len()
    ))
}

fn c9_lemma() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut done = 0;
    while done < 1000 {
        let n = rng.gen_range(2..=6);
        let r = rng.gen_range(n + 1..=3 * n);
        let labels: Vec<Label> = (0..r).map(|_| rng.gen_range(0..1u64 << n)).collect();
        if !covers(&labels, n) {
            continue;
        }
        let keep = lemma_r_to_n(&labels, n).map_err(|e| e.to_string())?;
        ensure!(
            keep.len() <= n,
            "kept {} of {r} labels for n={n}",
            keep.len()
        );
        ensure!(keep.windows(2).all(|w| w[0] < w[1]), "indices not distinct");
        ensure!(keep.iter().all(|&i| i < r), "index out of range");
        let sub: Vec<Label> = keep.iter().map(|&i| labels[i]).collect();
        ensure!(covers(&sub, n), "subset does not cover");
        done += 1;
    }
    Ok("10^3 covering inputs, N in [2,6]".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check, Duration); 9] = [
        ("NOT gadget sweep", c1_not_sweep, Duration::from_secs(1)),
        ("NAND gadget sweep", c2_nand_sweep, Duration::from_secs(1)),
        ("phi properties", c3_phi, Duration::from_secs(5)),
        ("lambda-hat oracle", c4_lambda_hat, Duration::from_secs(10)),
        ("snake roundtrip", c5_snake, Duration::from_secs(300)),
        (
            "standard CH roundtrip",
            c6_standard_roundtrip,
            Duration::from_secs(60),
        ),
        ("3-block variant", c7_three_block, Duration::from_secs(120)),
        (
            "negative controls",
            c8_negative_controls,
            Duration::from_secs(10),
        ),
        ("r-to-N lemma", c9_lemma, Duration::from_secs(1)),
    ];
    let mut failed = 0;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let res = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let took = start.elapsed();
        let res = match res {
            Ok(_) if took > *budget => Err(format!("took {took:.2?}, budget {budget:?}")),
            r => r,
        };
        match res {
            Ok(msg) => println!("PASS criterion {} ({name}): {msg} [{took:.2?}]", i + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {} ({name}): {msg} [{took:.2?}]", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
