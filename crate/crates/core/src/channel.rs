//! Scenario geometry, distance-dependent path loss and Rician fading.
//!
//! Channels follow
//! `h = √L (√(K/(1+K)) h_LoS + √(1/(1+K)) h_NLoS)` with `h_NLoS` i.i.d.
//! circularly symmetric unit-variance Gaussian. The LoS component is the
//! all-ones matrix; no antenna geometry is modeled for it.
//!
//! Every trial draws from its own ChaCha stream keyed by `(seed, trial)`, so
//! a trial can be regenerated in isolation and trials may run on any thread.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::{CMatrix, Complex64, Error, Result};

/// Which side of the surface the receiver sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Reflective,
    Transmissive,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Reflective => "reflective",
            Mode::Transmissive => "transmissive",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "reflective" => Ok(Mode::Reflective),
            "transmissive" => Ok(Mode::Transmissive),
            other => Err(format!("unknown mode `{other}`")),
        }
    }
}

/// 2-D position in meters.
pub type Position = [f64; 2];

/// Full description of one simulated link budget and array layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub tx_pos: Position,
    pub rx_pos: Position,
    pub ris_pos: Position,
    /// Path loss at the 1 m reference distance, linear.
    pub ref_loss: f64,
    pub alpha_rt: f64,
    pub alpha_ri: f64,
    pub alpha_it: f64,
    /// Rician factor, linear. `0` is Rayleigh, `+∞` is pure LoS.
    pub rician_factor: f64,
    /// Transmit power in watts.
    pub tx_power: f64,
    pub n_ris: usize,
    pub n_tx: usize,
    pub n_rx: usize,
    pub n_users: usize,
    pub group_size: usize,
    pub mode: Mode,
    /// When false the transmitter-receiver channel is zeroed after drawing.
    pub direct_link: bool,
    pub trials: usize,
    pub seed: u64,
}

impl Default for ScenarioConfig {
    /// Reflective single-antenna layout: transmitter at `(0,0)`, receiver at
    /// `(52,0)`, surface at `(50,2)`, `L0 = -30 dB`, `P_T = 10 W`.
    fn default() -> Self {
        Self {
            tx_pos: [0.0, 0.0],
            rx_pos: [52.0, 0.0],
            ris_pos: [50.0, 2.0],
            ref_loss: db_to_linear(-30.0),
            alpha_rt: 3.5,
            alpha_ri: 2.8,
            alpha_it: 2.0,
            rician_factor: 0.0,
            tx_power: 10.0,
            n_ris: 16,
            n_tx: 1,
            n_rx: 1,
            n_users: 1,
            group_size: 1,
            mode: Mode::Reflective,
            direct_link: true,
            trials: 1000,
            seed: 0,
        }
    }
}

impl ScenarioConfig {
    /// Transmissive layout: receiver moved to `(52,4)` behind a weak direct
    /// link (`α_RT = 4`).
    pub fn transmissive() -> Self {
        Self {
            rx_pos: [52.0, 4.0],
            alpha_rt: 4.0,
            mode: Mode::Transmissive,
            ..Self::default()
        }
    }

    /// Number of receive rows in the generated channels: one per antenna of
    /// every user.
    pub fn receive_rows(&self) -> usize {
        self.n_rx * self.n_users
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("n_ris", self.n_ris),
            ("n_tx", self.n_tx),
            ("n_rx", self.n_rx),
            ("n_users", self.n_users),
            ("group_size", self.group_size),
        ];
        for (key, value) in positive {
            if value == 0 {
                return Err(Error::config(key, "must be at least 1"));
            }
        }
        if self.n_ris % self.group_size != 0 {
            return Err(Error::config(
                "group_size",
                format!("{} does not divide n_ris = {}", self.group_size, self.n_ris),
            ));
        }
        if !(self.rician_factor >= 0.0) {
            return Err(Error::config("k_factor_db", "Rician factor must be non-negative"));
        }
        if !(self.tx_power > 0.0 && self.tx_power.is_finite()) {
            return Err(Error::config("tx_power", "must be positive and finite"));
        }
        if !(self.ref_loss > 0.0 && self.ref_loss.is_finite()) {
            return Err(Error::config("l0_db", "reference loss must be finite"));
        }
        if self.mode == Mode::Transmissive && self.n_ris % 2 != 0 {
            return Err(Error::config(
                "n_ris",
                "transmissive mode needs an even number of elements",
            ));
        }
        link_distances(self)?;
        Ok(())
    }
}

/// Channels of one trial.
///
/// `h_rt` is `rows × N_T`, `h_ri` is `rows × N_I`, `h_it` is `N_I × N_T`.
/// For multi-user runs every row belongs to one single-antenna user.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    pub h_rt: CMatrix,
    pub h_ri: CMatrix,
    pub h_it: CMatrix,
    pub user_weights: Vec<f64>,
}

impl ChannelSet {
    pub fn new(h_rt: CMatrix, h_ri: CMatrix, h_it: CMatrix) -> Result<Self> {
        if h_rt.nrows() != h_ri.nrows()
            || h_rt.ncols() != h_it.ncols()
            || h_ri.ncols() != h_it.nrows()
        {
            return Err(Error::DimensionMismatch(format!(
                "H_RT {}x{}, H_RI {}x{}, H_IT {}x{}",
                h_rt.nrows(),
                h_rt.ncols(),
                h_ri.nrows(),
                h_ri.ncols(),
                h_it.nrows(),
                h_it.ncols()
            )));
        }
        let rows = h_rt.nrows();
        Ok(Self {
            h_rt,
            h_ri,
            h_it,
            user_weights: vec![1.0; rows],
        })
    }

    pub fn n_ris(&self) -> usize {
        self.h_it.nrows()
    }

    pub fn n_tx(&self) -> usize {
        self.h_it.ncols()
    }

    pub fn n_rx(&self) -> usize {
        self.h_ri.nrows()
    }

    /// The scalar/vector view for a single-antenna link, if this is one.
    pub fn siso(&self) -> Option<crate::synth::SisoLink> {
        (self.n_rx() == 1 && self.n_tx() == 1).then(|| crate::synth::SisoLink {
            h_rt: self.h_rt[(0, 0)],
            h_ri: self.h_ri.row(0).into_owned(),
            h_it: self.h_it.column(0).into_owned(),
        })
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// `L0 · d^(-α)`.
pub fn path_loss(distance: f64, alpha: f64, ref_loss: f64) -> Result<f64> {
    if !(distance > 0.0 && distance.is_finite()) {
        return Err(Error::InvalidGeometry(format!(
            "distance must be positive, got {distance}"
        )));
    }
    Ok(ref_loss * distance.powf(-alpha))
}

/// LoS and NLoS amplitude weights `(√(K/(1+K)), √(1/(1+K)))`.
pub fn rician_weights(k_factor: f64) -> (f64, f64) {
    if k_factor.is_infinite() {
        return (1.0, 0.0);
    }
    ((k_factor / (1.0 + k_factor)).sqrt(), (1.0 / (1.0 + k_factor)).sqrt())
}

fn cn01<R: rand::Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Draws a `rows × cols` Rician channel with large-scale gain `gain`.
///
/// The NLoS draws are consumed even when `k_factor` is infinite so the
/// stream position does not depend on the fading model.
pub fn sample_channel<R: rand::Rng + ?Sized>(
    rows: usize,
    cols: usize,
    gain: f64,
    k_factor: f64,
    rng: &mut R,
) -> Result<CMatrix> {
    if !(gain > 0.0) || !(k_factor >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "channel gain {gain} and Rician factor {k_factor} must be positive / non-negative"
        )));
    }
    let (w_los, w_nlos) = rician_weights(k_factor);
    let amp = gain.sqrt();
    let mut m = CMatrix::zeros(rows, cols);
    // Column-major fill, matching nalgebra storage order.
    for c in 0..cols {
        for r in 0..rows {
            let nlos = cn01(rng);
            m[(r, c)] = (Complex64::new(w_los, 0.0) + nlos * w_nlos) * amp;
        }
    }
    Ok(m)
}

fn distance(a: Position, b: Position) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Link distances `(d_RT, d_RI, d_IT)`.
pub fn link_distances(config: &ScenarioConfig) -> Result<(f64, f64, f64)> {
    let d_rt = distance(config.rx_pos, config.tx_pos);
    let d_ri = distance(config.rx_pos, config.ris_pos);
    let d_it = distance(config.ris_pos, config.tx_pos);
    for (name, d) in [("receiver/transmitter", d_rt), ("receiver/surface", d_ri), ("surface/transmitter", d_it)] {
        if d == 0.0 {
            return Err(Error::InvalidGeometry(format!("{name} positions coincide")));
        }
    }
    Ok((d_rt, d_ri, d_it))
}

/// The per-trial random stream.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Zeroes the odd (1-based) columns of `H_RI` and the even (1-based) rows of
/// `H_IT`: the transmitter sees only odd elements, the receiver only even ones.
pub fn apply_transmissive_mask(channels: &mut ChannelSet) {
    for col in (0..channels.h_ri.ncols()).step_by(2) {
        channels.h_ri.column_mut(col).fill(Complex64::new(0.0, 0.0));
    }
    for row in (1..channels.h_it.nrows()).step_by(2) {
        channels.h_it.row_mut(row).fill(Complex64::new(0.0, 0.0));
    }
}

/// Draws the channels of trial `trial`.
///
/// Draw order is `H_RT`, `H_RI`, `H_IT` so that runs which only differ in
/// `direct_link` or `mode` see the same surface channels.
pub fn build_scenario(config: &ScenarioConfig, trial: u64) -> Result<ChannelSet> {
    config.validate()?;
    let (d_rt, d_ri, d_it) = link_distances(config)?;
    let l_rt = path_loss(d_rt, config.alpha_rt, config.ref_loss)?;
    let l_ri = path_loss(d_ri, config.alpha_ri, config.ref_loss)?;
    let l_it = path_loss(d_it, config.alpha_it, config.ref_loss)?;

    let rows = config.receive_rows();
    let mut rng = trial_rng(config.seed, trial);
    let k = config.rician_factor;
    let mut h_rt = sample_channel(rows, config.n_tx, l_rt, k, &mut rng)?;
    let h_ri = sample_channel(rows, config.n_ris, l_ri, k, &mut rng)?;
    let h_it = sample_channel(config.n_ris, config.n_tx, l_it, k, &mut rng)?;
    if !config.direct_link {
        h_rt.fill(Complex64::new(0.0, 0.0));
    }
    let mut set = ChannelSet::new(h_rt, h_ri, h_it)?;
    set.user_weights = vec![1.0; rows];
    if config.mode == Mode::Transmissive {
        apply_transmissive_mask(&mut set);
    }
    Ok(set)
}
