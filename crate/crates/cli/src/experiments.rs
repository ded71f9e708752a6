//! One runner per experiment. Each returns a serializable result that also
//! knows its CSV table.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use anyhow::{bail, ensure, Context, Result};
use molwalk_core::coin::UnitaryCoin;
use molwalk_core::linalg::{circ_dist, cis, eigenphases, wrap_phase, C64};
use molwalk_core::molecule::{
    asymptotic_distribution, bound_state, dispersion, integrated_capture, max_speed, BoundStateRecord, Branch,
    MaxSpeed, VelocityHistogram,
};
use molwalk_core::qca::{
    beyond_free_reach, bose_collision_step, doubly_occupied, hadamard_pair_block, pair_equivalence, qca_step,
    single_particle, up_up_at_origin, CellCoin, GasState, PairEquivalence, PairPicture, MAX_CELLS,
};
use molwalk_core::spectral::{
    band_gap, check_unitarity_lemma, compute_r_converged, defect_coin_for, relative_torus_matrix, ring_spectrum, Arc,
    LemmaReport, SpectrumTable,
};
use molwalk_core::{
    build_interacting_step, coin_shift_walk, evolve, hadamard_walk, singlet_state_at_origin, Lattice, RelativeWalk,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::{
    AsymptoticArgs, Block, BoundStateArgs, BranchArg, DefectArgs, DispersionArgs, EvolveArgs, Experiment, FastMolArgs,
    GasInitial, Initial, Picture, QcaArgs, ScanArgs, SpectrumArgs, Spin,
};
use crate::table::Table;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Report {
    Joint(JointReport),
    Spectrum(SpectrumTable),
    Dispersion(DispersionReport),
    Velocity(VelocityReport),
    Capture(CaptureReport),
    BoundState(BoundStateRecord),
    Asymptotic(VelocityHistogram),
    Gas(GasReport),
    FastMolecule(FastMolReport),
    Defect(DefectReport),
}

pub fn run(experiment: &Experiment) -> Result<Report> {
    match experiment {
        Experiment::Evolve(a) => evolve_joint(a).map(Report::Joint),
        Experiment::Spectrum(a) => spectrum(a).map(Report::Spectrum),
        Experiment::Dispersion(a) => dispersion_table(a).map(Report::Dispersion),
        Experiment::Velocity(a) => velocity(a).map(Report::Velocity),
        Experiment::Capture(a) => capture(a).map(Report::Capture),
        Experiment::Boundstate(a) => boundstate(a).map(Report::BoundState),
        Experiment::Asymptotic(a) => asymptotic(a).map(Report::Asymptotic),
        Experiment::Qca(a) => qca(a).map(Report::Gas),
        Experiment::Fastmol(a) => fastmol(a).map(Report::FastMolecule),
        Experiment::DefectSynthesis(a) => defect(a).map(Report::Defect),
    }
}

impl Report {
    /// The CSV table, when the report has one.
    pub fn table(&self) -> Option<Table> {
        match self {
            Report::Joint(r) => Some(r.table()),
            Report::Spectrum(r) => Some(spectrum_table(r)),
            Report::Dispersion(r) => Some(r.table()),
            Report::Velocity(r) => Some(r.table()),
            Report::Capture(r) => Some(r.table()),
            Report::BoundState(r) => Some(bound_table(r)),
            Report::Asymptotic(r) => Some(histogram_table(r)),
            Report::Gas(r) => Some(r.table()),
            Report::FastMolecule(r) => Some(r.table()),
            Report::Defect(_) => None,
        }
    }
}

fn singlet_coin(g: f64) -> Result<UnitaryCoin> {
    Ok(UnitaryCoin::singlet_phase(cis(g))?)
}

fn branch(b: BranchArg) -> Branch {
    match b {
        BranchArg::Plus => Branch::Plus,
        BranchArg::Minus => Branch::Minus,
    }
}

/// `n` evenly spaced points on `[lo, hi]`, both ends included.
fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n).map(|j| lo + (hi - lo) * j as f64 / (n - 1) as f64).collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointReport {
    pub t: usize,
    pub ring: bool,
    pub coords: Vec<i64>,
    /// Row-major over `(x1, x2)`, indexed like `coords`.
    pub probability: Vec<f64>,
    pub total: f64,
}

impl JointReport {
    fn table(&self) -> Table {
        let mut t = Table::new(&["x1", "x2", "probability"]);
        let n = self.coords.len();
        for (k, p) in self.probability.iter().enumerate() {
            t.row().int(self.coords[k / n]).int(self.coords[k % n]).float(*p);
        }
        t
    }
}

fn evolve_joint(a: &EvolveArgs) -> Result<JointReport> {
    let lattice = match a.ring {
        Some(0) => bail!("--M must be positive"),
        Some(m) => Lattice::ring(m),
        None => Lattice::window(a.t + 1),
    };
    let start = match a.initial {
        Initial::Singlet => singlet_state_at_origin(lattice),
        Initial::UpUp => up_up_at_origin(lattice),
    };
    let step = build_interacting_step(&hadamard_walk(), &singlet_coin(a.g)?, lattice)?;
    let dist = evolve(&start, &step, a.t)?.joint_distribution();
    Ok(JointReport {
        t: a.t,
        ring: lattice.is_ring(),
        total: dist.total(),
        coords: dist.coords,
        probability: dist.prob,
    })
}

fn spectrum(a: &SpectrumArgs) -> Result<SpectrumTable> {
    ensure!(a.ring >= 2, "--M must be at least 2");
    Ok(ring_spectrum(a.ring, &hadamard_walk(), &singlet_coin(a.g)?)?)
}

fn spectrum_table(s: &SpectrumTable) -> Table {
    let mut t = Table::new(&["index", "p", "eigenphase", "in_gap", "band_distance"]);
    for r in &s.rows {
        for k in 0..r.eigenphases.len() {
            t.row().int(r.index as i64).float(r.p).float(r.eigenphases[k]).flag(r.in_gap[k]).float(r.band_distance[k]);
        }
    }
    t
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispersionRow {
    pub p: f64,
    pub omega_plus: f64,
    pub omega_minus: f64,
    pub allowed_plus: bool,
    pub allowed_minus: bool,
    pub velocity_plus: f64,
    pub velocity_minus: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispersionReport {
    pub g: f64,
    pub rows: Vec<DispersionRow>,
}

impl DispersionReport {
    fn table(&self) -> Table {
        let mut t = Table::new(&[
            "p",
            "omega_plus",
            "omega_minus",
            "allowed_plus",
            "allowed_minus",
            "velocity_plus",
            "velocity_minus",
        ]);
        for r in &self.rows {
            t.row()
                .float(r.p)
                .float(r.omega_plus)
                .float(r.omega_minus)
                .flag(r.allowed_plus)
                .flag(r.allowed_minus)
                .float(r.velocity_plus)
                .float(r.velocity_minus);
        }
        t
    }
}

fn dispersion_table(a: &DispersionArgs) -> Result<DispersionReport> {
    ensure!(a.grid >= 1, "--grid must be positive");
    let rows = linspace(-PI, PI, a.grid)
        .into_iter()
        .map(|p| {
            let [plus, minus] = dispersion(p, a.g);
            DispersionRow {
                p,
                omega_plus: plus.omega,
                omega_minus: minus.omega,
                allowed_plus: plus.allowed,
                allowed_minus: minus.allowed,
                velocity_plus: plus.group_velocity,
                velocity_minus: minus.group_velocity,
            }
        })
        .collect();
    Ok(DispersionReport { g: a.g, rows })
}

fn scan_values(a: &ScanArgs) -> Result<Vec<f64>> {
    ensure!(a.grid >= 1, "--grid must be positive");
    match a.g {
        Some(g) => Ok(vec![g]),
        None => {
            ensure!(a.g_points >= 1, "--g-points must be positive");
            Ok(linspace(0.0, PI, a.g_points))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VelocityRow {
    pub g: f64,
    #[serde(flatten)]
    pub max: MaxSpeed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VelocityReport {
    /// Largest speed of the free Hadamard walk.
    pub free_speed: f64,
    pub rows: Vec<VelocityRow>,
}

impl VelocityReport {
    fn table(&self) -> Table {
        let mut t = Table::new(&["g", "max_speed", "at_p", "unconstrained", "unconstrained_allowed"]);
        for r in &self.rows {
            t.row()
                .float(r.g)
                .float(r.max.speed)
                .float(r.max.at_p)
                .float(r.max.unconstrained)
                .flag(r.max.unconstrained_allowed);
        }
        t
    }
}

fn velocity(a: &ScanArgs) -> Result<VelocityReport> {
    let rows = scan_values(a)?.into_iter().map(|g| VelocityRow { g, max: max_speed(g, a.grid) }).collect();
    Ok(VelocityReport { free_speed: FRAC_1_SQRT_2, rows })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaptureRow {
    pub g: f64,
    pub integrated_capture: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaptureReport {
    pub rows: Vec<CaptureRow>,
}

impl CaptureReport {
    fn table(&self) -> Table {
        let mut t = Table::new(&["g", "integrated_capture"]);
        for r in &self.rows {
            t.row().float(r.g).float(r.integrated_capture);
        }
        t
    }
}

fn capture(a: &ScanArgs) -> Result<CaptureReport> {
    let rows = scan_values(a)?
        .into_iter()
        .map(|g| CaptureRow { g, integrated_capture: integrated_capture(g, a.grid) })
        .collect();
    Ok(CaptureReport { rows })
}

fn boundstate(a: &BoundStateArgs) -> Result<BoundStateRecord> {
    ensure!(a.cutoff >= 1, "--cutoff must be positive");
    bound_state(a.p, a.g, branch(a.branch), a.cutoff)
        .with_context(|| format!("no bound state at p = {}, g = {}", a.p, a.g))
}

fn bound_table(r: &BoundStateRecord) -> Table {
    let mut t = Table::new(&[
        "j",
        "separation",
        "weight",
        "re_uu",
        "im_uu",
        "re_ud",
        "im_ud",
        "re_du",
        "im_du",
        "re_dd",
        "im_dd",
    ]);
    for (j, amp) in r.sites.iter().zip(&r.amplitudes) {
        let row = t.row().int(*j).int(2 * j).float(amp.iter().map(|c| c.norm_sqr()).sum());
        for c in amp {
            row.float(c.re).float(c.im);
        }
    }
    t
}

fn asymptotic(a: &AsymptoticArgs) -> Result<VelocityHistogram> {
    ensure!(a.bins >= 1, "--bins must be positive");
    ensure!(a.grid >= 1, "--grid must be positive");
    Ok(asymptotic_distribution(a.g, a.bins, a.grid)?)
}

fn histogram_table(h: &VelocityHistogram) -> Table {
    let mut t = Table::new(&["v_low", "v_high", "density"]);
    for (k, d) in h.density.iter().enumerate() {
        t.row().float(h.edges[k]).float(h.edges[k + 1]).float(*d);
    }
    t
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GasStep {
    pub t: usize,
    /// `(left, right)` occupation per cell.
    pub occupations: Vec<(f64, f64)>,
    /// `(particle number, weight)` for every populated sector.
    pub sector_weights: Vec<(u32, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GasReport {
    pub steps: Vec<GasStep>,
    /// Pair-sector comparison with the walk, for a pair start.
    pub equivalence: Option<PairEquivalence>,
}

impl GasReport {
    fn table(&self) -> Table {
        let mut t = Table::new(&["t", "cell", "left", "right"]);
        for s in &self.steps {
            for (c, (l, r)) in s.occupations.iter().enumerate() {
                t.row().int(s.t as i64).int(c as i64).float(*l).float(*r);
            }
        }
        t
    }
}

fn qca(a: &QcaArgs) -> Result<GasReport> {
    ensure!((1..=MAX_CELLS).contains(&a.ring), "--M must be in 1..={MAX_CELLS}");
    let cell = a.cell.unwrap_or(a.ring / 2);
    ensure!(cell < a.ring, "--cell {cell} is outside a ring of {} cells", a.ring);
    let coin = CellCoin::new(UnitaryCoin::hadamard(), cis(a.g))?;
    let start: GasState = match a.initial {
        GasInitial::Pair => doubly_occupied(a.ring, cell)?,
        GasInitial::Single => single_particle(a.ring, cell, if a.spin == Spin::Up { 0 } else { 1 })?,
    };
    let mut steps = Vec::with_capacity(a.t + 1);
    let mut s = start.clone();
    for t in 0..=a.t {
        if t > 0 {
            s = qca_step(&s, &coin);
        }
        steps.push(GasStep {
            t,
            occupations: s.occupations(),
            sector_weights: s.sector_weights().into_iter().collect(),
        });
    }
    let equivalence = match a.initial {
        GasInitial::Pair => {
            let picture = match a.picture {
                Picture::Bose => PairPicture::Bose,
                Picture::Fermi => PairPicture::Fermi,
            };
            Some(pair_equivalence(&coin, &start, picture, a.t)?)
        }
        GasInitial::Single => None,
    };
    Ok(GasReport { steps, equivalence })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FastMolRun {
    /// Seed of the random block; absent for the Hadamard block.
    pub seed: Option<u64>,
    /// Bound mass whose centre of mass is beyond the free walk's reach.
    pub beyond_free_reach: f64,
    pub peak_x1: i64,
    pub peak_x2: i64,
    pub peak_probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FastMolReport {
    pub t: usize,
    /// `t/√2`, the free walk's reach.
    pub free_reach: f64,
    pub runs: Vec<FastMolRun>,
    /// Runs whose mass beyond the free reach exceeds the threshold.
    pub hits: usize,
}

impl FastMolReport {
    fn table(&self) -> Table {
        let mut t = Table::new(&["seed", "beyond_free_reach", "peak_x1", "peak_x2", "peak_probability"]);
        for r in &self.runs {
            let row = t.row();
            match r.seed {
                Some(s) => row.int(s as i64),
                None => row.text(""),
            };
            row.float(r.beyond_free_reach).int(r.peak_x1).int(r.peak_x2).float(r.peak_probability);
        }
        t
    }
}

fn fastmol(a: &FastMolArgs) -> Result<FastMolReport> {
    ensure!(a.t >= 1, "--t must be positive");
    ensure!(a.width >= 0, "--width must be non-negative");
    let lattice = Lattice::window(a.t + 2);
    let blocks: Vec<(Option<u64>, molwalk_core::CMat)> = match a.block {
        Block::Hadamard => vec![(None, hadamard_pair_block())],
        Block::Random => {
            ensure!(a.seeds >= 1, "--seeds must be positive");
            (a.seed..a.seed.checked_add(a.seeds).context("--seeds overflows the seed range")?)
                .map(|s| (Some(s), UnitaryCoin::haar_random(3, &mut ChaCha8Rng::seed_from_u64(s)).into_matrix()))
                .collect()
        }
    };
    let mut runs = Vec::with_capacity(blocks.len());
    for (seed, block) in blocks {
        let step = bose_collision_step(&hadamard_walk(), &block, lattice)?;
        let dist = evolve(&up_up_at_origin(lattice), &step, a.t)?.joint_distribution();
        let n = dist.sites();
        let (k, peak) =
            dist.prob
                .iter()
                .copied()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |b, (k, p)| if p > b.1 { (k, p) } else { b });
        runs.push(FastMolRun {
            seed,
            beyond_free_reach: beyond_free_reach(&dist, a.t, a.width, a.margin),
            peak_x1: dist.coords[k / n],
            peak_x2: dist.coords[k % n],
            peak_probability: peak,
        });
    }
    let hits = runs.iter().filter(|r| r.beyond_free_reach > a.threshold).count();
    Ok(FastMolReport { t: a.t, free_reach: a.t as f64 * FRAC_1_SQRT_2, runs, hits })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorusCheck {
    pub sizes: Vec<usize>,
    /// Distance from the target to the nearest torus eigenphase.
    pub closest: f64,
    /// Eigenphases within 1e-6 of the target.
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DefectReport {
    pub gaps: Vec<Arc>,
    /// Target eigenphase, the midpoint of the widest gap.
    pub target: f64,
    pub quadrature_points: usize,
    pub quadrature_residual: f64,
    /// Unitarity check of `R(z)`; `None` residuals stand for a singular `R`.
    pub hermitian_residual: f64,
    pub unitarity_residual: Option<f64>,
    pub lemma_passed: bool,
    /// Defect coin as rows of `[re, im]` entries.
    pub coin: Vec<Vec<[f64; 2]>>,
    pub condition_number: f64,
    pub raw_unitarity_residual: f64,
    pub torus: Option<TorusCheck>,
}

fn defect(a: &DefectArgs) -> Result<DefectReport> {
    ensure!(a.grid >= 2, "--grid must be at least 2");
    ensure!(a.quadrature >= 1, "--quadrature must be positive");
    let rot = UnitaryCoin::x_rotation(a.eps);
    let w = coin_shift_walk(&[rot.clone(), rot.clone(), rot], 2)?;
    let rel = RelativeWalk::new(&w, &[0.0, 0.0])?;
    let gaps = band_gap(&rel, a.grid)?;
    let Some(widest) = gaps.iter().copied().max_by(|x, y| x.width().total_cmp(&y.width())) else {
        bail!("no verified gap at --eps {} on a grid of {}", a.eps, a.grid);
    };
    let target = widest.midpoint();
    let r = compute_r_converged(C64::from_polar(1.0, target), &rel, a.quadrature, a.tol, a.max_quadrature)?;
    let LemmaReport { hermitian_residual, unitarity_residual, passed, .. } = check_unitarity_lemma(&r);
    let syn = defect_coin_for(&r)?;
    let m = syn.coin.matrix();
    let coin = (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect();
    let torus = if a.torus == 0 {
        None
    } else {
        let sizes: Vec<usize> = rel.stride().iter().map(|&s| a.torus / s as usize).collect();
        ensure!(sizes.iter().all(|&s| s >= 2), "--torus {} is too small for the walk's stride", a.torus);
        let phases = eigenphases(&relative_torus_matrix(&rel, &sizes, &syn.coin)?)?;
        let target = wrap_phase(target);
        let closest = phases.iter().map(|&x| circ_dist(x, target)).fold(f64::INFINITY, f64::min);
        let multiplicity = phases.iter().filter(|&&x| circ_dist(x, target) <= 1e-6).count();
        Some(TorusCheck { sizes, closest, multiplicity })
    };
    Ok(DefectReport {
        gaps,
        target,
        quadrature_points: r.grid_points,
        quadrature_residual: r.quadrature_residual,
        hermitian_residual,
        unitarity_residual: unitarity_residual.is_finite().then_some(unitarity_residual),
        lemma_passed: passed,
        coin,
        condition_number: syn.condition_number,
        raw_unitarity_residual: syn.raw_unitarity_residual,
        torus,
    })
}
