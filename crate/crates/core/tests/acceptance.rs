//! Acceptance run: one PASS/FAIL line per criterion and a summary line.
//!
//! By default this is a report and exits 0 once every criterion has run, so a
//! failing criterion shows up as a FAIL line without stopping the rest of the
//! workspace tests. Set `ACCEPTANCE_STRICT=1` to exit non-zero on any FAIL.
//!
//! Runs as a plain binary (`harness = false`) so the lines always reach the
//! test log.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};
use std::time::Instant;

use molwalk_core::coin::UnitaryCoin;
use molwalk_core::linalg::{circ_dist, eigenphases, wrap_phase, C64};
use molwalk_core::molecule::{
    bound_state, dispersion, integrated_capture, is_allowed, max_speed, omega, pole_v1, virtual_walk, Branch,
};
use molwalk_core::qca::{
    bose_collision_step, doubly_occupied, hadamard_pair_block, pair_equivalence, up_up_at_origin, CellCoin, PairPicture,
};
use molwalk_core::spectral::band::band_gap;
use molwalk_core::spectral::{
    check_unitarity_lemma, compute_r_converged, defect_coin_for, relative_torus_matrix, ring_spectrum, SpectrumTable,
};
use molwalk_core::state::outer_peaks;
use molwalk_core::symbol::{coin_shift_walk, coin_walk, hadamard_walk, RelativeWalk};
use molwalk_core::{build_interacting_step, evolve, singlet_state_at_origin, Lattice};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn singlet_evolution(g: f64, t: usize) -> molwalk_core::TwoParticleState {
    let lat = Lattice::window(t + 2);
    let coin = UnitaryCoin::singlet_phase(C64::from_polar(1.0, g)).unwrap();
    let step = build_interacting_step(&hadamard_walk(), &coin, lat).unwrap();
    evolve(&singlet_state_at_origin(lat), &step, t).unwrap()
}

fn c1_molecule_speed() -> Outcome {
    let start = Instant::now();
    let m = max_speed(PI, 10_000);
    let exact = m.speed == 1.0 / 3.0 && m.at_p.abs() == FRAC_PI_2;
    let psi = singlet_evolution(PI, 60);
    let cm = psi.joint_distribution().centre_of_mass_even();
    let coords: Vec<i64> = cm.iter().map(|c| c.0).collect();
    let vals: Vec<f64> = cm.iter().map(|c| c.1).collect();
    let peaks = outer_peaks(&coords, &vals, 5, 0.5);
    let secs = start.elapsed().as_secs_f64();
    let ok_peaks = matches!(peaks, Some((l, r)) if (l + 20).abs() <= 2 && (r - 20).abs() <= 2);
    outcome(
        exact && ok_peaks && secs < 10.0,
        format!("max_speed(pi) = {} at p = {}, CM peaks {:?}, {:.2}s", m.speed, m.at_p, peaks, secs),
    )
}

fn c2_free_peaks() -> Outcome {
    let psi = singlet_evolution(0.0, 50);
    let dist = psi.joint_distribution();
    let peaks = outer_peaks(&dist.coords, &dist.marginal_first(), 5, 0.5);
    let ok = matches!(peaks, Some((l, r)) if (l + 35).abs() <= 2 && (r - 35).abs() <= 2);
    outcome(ok, format!("x1 marginal peaks {:?}, t/sqrt2 = {:.2}", peaks, 50.0 * FRAC_1_SQRT_2))
}

fn c3_integrated_capture() -> Outcome {
    let ic = integrated_capture(PI, 2048);
    let psi = singlet_evolution(PI, 50);
    let near = psi.joint_distribution().near_diagonal_mass(psi.lattice(), 5);
    let ok = (ic - 2.0 / 3.0).abs() <= 1e-4 && (near - 2.0 / 3.0).abs() <= 0.05;
    outcome(ok, format!("integrated_capture(pi) = {ic:.10}, mass |x1-x2|<=5 at t=50 = {near:.6}"))
}

/// Worst distance from an in-gap eigenphase to the allowed branches at its `p`.
fn in_gap_vs_dispersion(table: &SpectrumTable, g: f64) -> (f64, usize) {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for row in &table.rows {
        for w in row.gap_phases() {
            count += 1;
            let d = Branch::BOTH
                .iter()
                .filter(|&&b| is_allowed(row.p, g, b))
                .map(|&b| circ_dist(w, omega(row.p, g, b)))
                .fold(f64::INFINITY, f64::min);
            worst = worst.max(d);
        }
    }
    (worst, count)
}

fn c4_ring_spectrum() -> Outcome {
    let start = Instant::now();
    let gamma = UnitaryCoin::singlet_phase(C64::new(-1.0, 0.0)).unwrap();
    let t28 = ring_spectrum(28, &hadamard_walk(), &gamma).unwrap();
    let t56 = ring_spectrum(56, &hadamard_walk(), &gamma).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let rows_with_gap = t28.rows.iter().filter(|r| !r.gap_phases().is_empty()).count();
    let (worst28, n28) = in_gap_vs_dispersion(&t28, PI);
    let mut stability: f64 = 0.0;
    for row in &t28.rows {
        let fine = &t56.rows[2 * row.index];
        for w in row.gap_phases() {
            let d = fine.eigenphases.iter().map(|&x| circ_dist(x, w)).fold(f64::INFINITY, f64::min);
            stability = stability.max(d);
        }
    }
    let ok = rows_with_gap > 0 && worst28 <= 1e-8 && stability <= 1e-8 && secs < 30.0;
    outcome(
        ok,
        format!(
            "{n28} in-gap eigenphases on {rows_with_gap}/28 rows, worst |omega_ring - omega(p)| = {worst28:.3e}, \
             M=56 shift {stability:.3e}, {secs:.2}s"
        ),
    )
}

/// A random coin walk relative block with a sampled gap and `z` inside it.
fn random_gap_sample(rng: &mut ChaCha8Rng) -> (RelativeWalk, C64) {
    loop {
        let coin = UnitaryCoin::haar_random(2, rng);
        let w = coin_walk(&coin).unwrap();
        let p = rng.random_range(-PI..PI);
        let rel = RelativeWalk::new_1d(&w, p).unwrap();
        let arcs: Vec<_> = band_gap(&rel, 1024).unwrap().into_iter().filter(|a| a.width() > 0.05).collect();
        if arcs.is_empty() {
            continue;
        }
        let arc = arcs[rng.random_range(0..arcs.len())];
        let frac = rng.random_range(0.25..0.75);
        return (rel, C64::from_polar(1.0, arc.start + frac * arc.width()));
    }
}

fn c5_unitarity_lemma() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut herm, mut unit, mut passed) = (0.0f64, 0.0f64, 0);
    for _ in 0..50 {
        let (rel, z) = random_gap_sample(&mut rng);
        let r = compute_r_converged(z, &rel, 256, 1e-13, 1 << 16).unwrap();
        let rep = check_unitarity_lemma(&r);
        herm = herm.max(rep.hermitian_residual);
        unit = unit.max(rep.unitarity_residual);
        if rep.hermitian_residual <= 1e-9 && rep.unitarity_residual <= 1e-9 {
            passed += 1;
        }
    }
    outcome(passed == 50, format!("{passed}/50 pass, max ||R+R^dag-1|| = {herm:.3e}, max unitarity = {unit:.3e}"))
}

fn random_allowed(rng: &mut ChaCha8Rng) -> (f64, f64, Branch) {
    loop {
        let g = rng.random_range(-PI..PI);
        let p = rng.random_range(-PI..PI);
        let b = if rng.random_bool(0.5) { Branch::Plus } else { Branch::Minus };
        if g.abs() > 0.05 && is_allowed(p, g, b) {
            return (p, g, b);
        }
    }
}

fn cutoff_for(v1: f64) -> usize {
    if v1 < 1e-12 {
        2
    } else {
        ((1e-10f64).ln() / v1.ln()).ceil().max(2.0) as usize
    }
}

fn c6_bound_state() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let (p, g, b) = random_allowed(&mut rng);
        let x = cutoff_for(pole_v1(p, g, b).unwrap().norm());
        worst = worst.max(bound_state(p, g, b, x).unwrap().eigen_residual);
    }
    let strict = bound_state(FRAC_PI_2, PI, Branch::Plus, 6).unwrap();
    let outside = (-6i64..=6).filter(|j| j.abs() > 1).map(|j| strict.amplitude_norm(j)).fold(0.0, f64::max);
    let inside = (-1i64..=1).all(|j| strict.amplitude_norm(j) > 0.0);
    let tail = bound_state(0.0, PI, Branch::Plus, 12).unwrap();
    let ratio_err =
        (1..=8).map(|x| (tail.amplitude_norm(x + 1) / tail.amplitude_norm(x) - 1.0 / 3.0).abs()).fold(0.0, f64::max);
    let ok = worst <= 1e-8 && outside < 1e-14 && inside && ratio_err <= 1e-8;
    outcome(
        ok,
        format!("worst residual {worst:.3e} (50 samples), outside {{-1,0,1}} {outside:.1e}, tail ratio error {ratio_err:.1e}"),
    )
}

fn c7_virtual_walk() -> Outcome {
    let mut worst: f64 = 0.0;
    for g in [PI, PI / 4.0, PI / 2.0] {
        let w = virtual_walk(C64::from_polar(1.0, g)).unwrap();
        for i in 0..1001 {
            let p = -PI + 2.0 * PI * i as f64 / 1000.0;
            let ph = eigenphases(&w.eval1(p)).unwrap();
            for b in Branch::BOTH {
                let o = omega(p, g, b);
                worst = worst.max(ph.iter().map(|&x| circ_dist(x, o)).fold(f64::INFINITY, f64::min));
            }
        }
    }
    outcome(worst <= 1e-10, format!("max branch deviation {worst:.3e} over 3 x 1001 momenta"))
}

fn c8_qca() -> Outcome {
    let coin = CellCoin::new(UnitaryCoin::hadamard(), C64::new(-1.0, 0.0)).unwrap();
    let bose = pair_equivalence(&coin, &doubly_occupied(12, 6).unwrap(), PairPicture::Bose, 6).unwrap();
    let fermi = pair_equivalence(&coin, &doubly_occupied(26, 13).unwrap(), PairPicture::Fermi, 6).unwrap();
    outcome(
        bose.max_deviation() <= 1e-12 && fermi.max_deviation() <= 1e-12,
        format!(
            "M=12 hard-core pair sector: max deviation {:.2e}, phase/step {}; singlet picture on M=26: {:.2e}",
            bose.max_deviation(),
            bose.phase,
            fermi.max_deviation()
        ),
    )
}

fn c9_defect_synthesis() -> Outcome {
    let start = Instant::now();
    let rot = UnitaryCoin::x_rotation(0.1);
    let w = coin_shift_walk(&[rot.clone(), rot.clone(), rot], 2).unwrap();
    let rel = RelativeWalk::new(&w, &[0.0, 0.0]).unwrap();
    let arcs = band_gap(&rel, 256).unwrap();
    let Some(arc) = arcs.iter().copied().max_by(|a, b| a.width().total_cmp(&b.width())) else {
        return outcome(false, "no verified gap".into());
    };
    let z = C64::from_polar(1.0, arc.midpoint());
    let r = compute_r_converged(z, &rel, 64, 1e-13, 512).unwrap();
    let syn = defect_coin_for(&r).unwrap();
    let sizes: Vec<usize> = rel.stride().iter().map(|&s| 32 / s as usize).collect();
    let m = relative_torus_matrix(&rel, &sizes, &syn.coin).unwrap();
    let ph = eigenphases(&m).unwrap();
    let target = wrap_phase(z.arg());
    let best = ph.iter().map(|&x| circ_dist(x, target)).fold(f64::INFINITY, f64::min);
    let mult = ph.iter().filter(|&&x| circ_dist(x, target) <= 1e-6).count();
    outcome(
        best <= 1e-6,
        format!(
            "gap ({:.4}, {:.4}), z = e^{{{:.4}i}}, torus {:?}, closest eigenphase {best:.2e}, multiplicity {mult}, {:.2}s",
            arc.start,
            arc.end,
            target,
            sizes,
            start.elapsed().as_secs_f64()
        ),
    )
}

fn c10_fast_molecule() -> Outcome {
    let lat = Lattice::window(22);
    let step = bose_collision_step(&hadamard_walk(), &hadamard_pair_block(), lat).unwrap();
    let mut psi = up_up_at_origin(lat);
    let mut direction = 0i64;
    let mut ok = true;
    for t in 1..=20i64 {
        psi = step.apply(&psi).unwrap();
        let dist = psi.joint_distribution();
        let occupied: Vec<(i64, i64, f64)> = (0..dist.sites())
            .flat_map(|i| (0..dist.sites()).map(move |j| (i, j)))
            .filter(|&(i, j)| dist.at(i, j) > 1e-14)
            .map(|(i, j)| (dist.coords[i], dist.coords[j], dist.at(i, j)))
            .collect();
        if t == 1 && occupied.len() == 1 {
            direction = occupied[0].0.signum();
        }
        let good = occupied.len() == 1
            && occupied[0].0 == occupied[0].1
            && occupied[0].0 == direction * t
            && (occupied[0].2 - 1.0).abs() < 1e-12;
        ok &= good && direction != 0;
    }
    outcome(ok, format!("|up,up> moves one diagonal site per step, direction {direction:+}"))
}

fn c11_null_case() -> Outcome {
    let allowed = (0..1001)
        .map(|i| -PI + 2.0 * PI * i as f64 / 1000.0)
        .flat_map(|p| dispersion(p, 0.0))
        .filter(|d| d.allowed)
        .count();
    let gamma = UnitaryCoin::singlet_phase(C64::new(1.0, 0.0)).unwrap();
    let table = ring_spectrum(28, &hadamard_walk(), &gamma).unwrap();
    outcome(
        allowed == 0 && table.gap_count() == 0,
        format!("allowed branches at g=0: {allowed}, in-gap eigenphases on M=28: {}", table.gap_count()),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 11] = [
        ("molecule speed", c1_molecule_speed),
        ("free-walk peaks", c2_free_peaks),
        ("integrated capture", c3_integrated_capture),
        ("ring spectrum", c4_ring_spectrum),
        ("unitarity lemma", c5_unitarity_lemma),
        ("bound-state residual", c6_bound_state),
        ("virtual molecule walk", c7_virtual_walk),
        ("automaton equivalence", c8_qca),
        ("defect synthesis", c9_defect_synthesis),
        ("fast molecule", c10_fast_molecule),
        ("null case", c11_null_case),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        if !o.pass {
            failed += 1;
        }
        println!("criterion {:>2} {:<22} {}  {}", i + 1, name, if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("acceptance: {} passed, {} failed", criteria.len() - failed, failed);
    let strict = std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    if failed > 0 && strict {
        std::process::exit(1);
    }
}
