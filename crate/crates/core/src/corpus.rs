//! Seeded test data: random band-limited fields and the frozen probe corpus.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::norms::{modulation_norm, sobolev_norm_spectral, Exponent};
use crate::solitons::{soliton_field, SolitonParams};
use crate::spectral::{inverse_transform, Field, GridSpec, SpectralField};

/// Seed of the frozen probe corpus.
pub const CORPUS_SEED: u64 = 0x6d6b_6476;

/// Number of elements in the frozen probe corpus.
pub const CORPUS_SIZE: usize = 200;

/// Draws `sin^2`-tapered complex Gaussian coefficients on the lattice points of
/// `[lo, hi]`, in grid order. Coefficients outside the band are zero.
pub fn random_band_coefficients(grid: &GridSpec, lo: f64, hi: f64, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let width = hi - lo;
    grid.frequencies()
        .map(|xi| {
            if xi <= lo || xi >= hi {
                return Complex64::new(0.0, 0.0);
            }
            let taper = (std::f64::consts::PI * (xi - lo) / width).sin().powi(2);
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re, im) * taper
        })
        .collect()
}

/// Random field with spectrum in `[lo, hi]` and unit `L^2` norm.
pub fn random_band_field(grid: &GridSpec, lo: f64, hi: f64, seed: u64) -> Result<Field> {
    if !(hi > lo) {
        return Err(Error::param("band", format!("[{lo}, {hi}] is empty")));
    }
    if lo.abs().max(hi.abs()) > grid.nyquist() {
        return Err(Error::OutsideBand {
            requested: lo.abs().max(hi.abs()),
            nyquist: grid.nyquist(),
        });
    }
    let spectrum = SpectralField::new(*grid, random_band_coefficients(grid, lo, hi, seed))?;
    let norm = sobolev_norm_spectral(&spectrum, 0.0);
    if norm == 0.0 {
        return Err(Error::param("band", format!("[{lo}, {hi}] holds no lattice frequency")));
    }
    inverse_transform(&spectrum.scale(Complex64::new(1.0 / norm, 0.0)))
}

/// Random field rescaled so its `M^{2,p}_s` norm equals `target`.
pub fn random_field_with_norm(
    grid: &GridSpec,
    band: f64,
    s: f64,
    p: Exponent,
    target: f64,
    seed: u64,
) -> Result<Field> {
    let f = random_band_field(grid, -band, band, seed)?;
    let norm = modulation_norm(&f, s, p)?;
    Ok(f.scale(Complex64::new(target / norm, 0.0)))
}

/// Recipe for one corpus input field.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FieldSpec {
    Random { lo: f64, hi: f64, seed: u64 },
    Soliton { carrier: f64, scale: f64 },
}

impl FieldSpec {
    pub fn realize(&self, grid: &GridSpec) -> Result<Field> {
        match *self {
            FieldSpec::Random { lo, hi, seed } => random_band_field(grid, lo, hi, seed),
            FieldSpec::Soliton { carrier, scale } => {
                soliton_field(&SolitonParams::new(carrier, scale)?, 0.0, grid)
            }
        }
    }

    fn feed(&self, hasher: &mut Sha256, grid: &GridSpec) {
        hasher.update(serde_json::to_vec(self).expect("spec serializes"));
        if let FieldSpec::Random { lo, hi, seed } = *self {
            for c in random_band_coefficients(grid, lo, hi, seed) {
                hasher.update(c.re.to_le_bytes());
                hasher.update(c.im.to_le_bytes());
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrilinearFamily {
    Random,
    SolitonProfile,
    /// All three inputs at the same high positive frequency.
    SameSign,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "probe", rename_all = "kebab-case")]
pub enum ProbeCase {
    BilinearCube { m: i64, n: i64, u: FieldSpec, v: FieldSpec },
    BilinearLp { n1: u64, n2: u64, u: FieldSpec, v: FieldSpec },
    Trilinear { family: TrilinearFamily, inputs: [FieldSpec; 3] },
}

impl ProbeCase {
    pub fn label(&self) -> String {
        match self {
            ProbeCase::BilinearCube { m, n, .. } => format!("cube m={m} n={n}"),
            ProbeCase::BilinearLp { n1, n2, .. } => format!("lp N1={n1} N2={n2}"),
            ProbeCase::Trilinear { family, inputs } => {
                format!("trilinear {family:?} {}", serde_json::to_string(inputs).unwrap_or_default())
            }
        }
    }
}

/// Grid for the unit-cube bilinear probes: `dxi = 1/8`, band 64.
pub fn cube_grid() -> GridSpec {
    GridSpec::new(2.0 * std::f64::consts::PI * 8.0, 1024).expect("valid grid")
}

/// Grid for the dyadic bilinear probes: `dxi = 1/8`, band 256.
pub fn dyadic_grid() -> GridSpec {
    GridSpec::new(2.0 * std::f64::consts::PI * 8.0, 4096).expect("valid grid")
}

/// Grid for the trilinear probes: `dxi = 1/32`, band 16.
pub fn trilinear_grid() -> GridSpec {
    GridSpec::new(2.0 * std::f64::consts::PI * 32.0, 1024).expect("valid grid")
}

/// Input band of the trilinear probes; products stay inside the grid band.
pub const TRILINEAR_BAND: f64 = 4.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Corpus {
    pub seed: u64,
    pub cases: Vec<ProbeCase>,
}

impl Corpus {
    /// Deterministic corpus: 80 cube pairs, 40 dyadic pairs, 50 random, 10
    /// soliton-profile and 20 same-sign trilinear triples.
    pub fn generate(seed: u64) -> Corpus {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut cases = Vec::with_capacity(CORPUS_SIZE);
        let mut next_seed = || -> u64 { rng.random() };
        let mut draws = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let wide = |s: u64| FieldSpec::Random { lo: -34.0, hi: 34.0, seed: s };
        while cases.len() < 80 {
            let m: i64 = draws.random_range(-32..=32);
            let n: i64 = draws.random_range(-32..=32);
            if (m + n).abs() < 2 || (m - n).abs() < 2 {
                continue;
            }
            cases.push(ProbeCase::BilinearCube { m, n, u: wide(next_seed()), v: wide(next_seed()) });
        }
        for j in 0..40 {
            let n1 = 1u64 << (3 + j % 6);
            let n2 = 1 + (j / 6 % 2) as u64;
            let full = |s: u64| FieldSpec::Random { lo: -256.0, hi: 256.0, seed: s };
            cases.push(ProbeCase::BilinearLp { n1, n2, u: full(next_seed()), v: full(next_seed()) });
        }
        let b = TRILINEAR_BAND;
        for _ in 0..50 {
            let band = |s: u64| FieldSpec::Random { lo: -b, hi: b, seed: s };
            cases.push(ProbeCase::Trilinear {
                family: TrilinearFamily::Random,
                inputs: [band(next_seed()), band(next_seed()), band(next_seed())],
            });
        }
        for j in 0..10 {
            let carrier = [0.0, 0.5, 1.0, -1.0, 1.5][j % 5];
            let scale = if j < 5 { 0.25 } else { 0.3 };
            let profile = FieldSpec::Soliton { carrier, scale };
            cases.push(ProbeCase::Trilinear {
                family: TrilinearFamily::SolitonProfile,
                inputs: [profile.clone(), profile.clone(), profile],
            });
        }
        for _ in 0..20 {
            let centre: f64 = draws.random_range(2.5..3.5);
            let narrow = |s: u64| FieldSpec::Random { lo: centre - 0.5, hi: centre + 0.5, seed: s };
            cases.push(ProbeCase::Trilinear {
                family: TrilinearFamily::SameSign,
                inputs: [narrow(next_seed()), narrow(next_seed()), narrow(next_seed())],
            });
        }
        Corpus { seed, cases }
    }

    pub fn frozen() -> Corpus {
        Corpus::generate(CORPUS_SEED)
    }

    /// SHA-256 over the case descriptions and the raw random coefficients.
    pub fn hash(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.seed.to_le_bytes());
        for case in &self.cases {
            hasher.update(case.label().as_bytes());
            match case {
                ProbeCase::BilinearCube { u, v, .. } => {
                    u.feed(&mut hasher, &cube_grid());
                    v.feed(&mut hasher, &cube_grid());
                }
                ProbeCase::BilinearLp { u, v, .. } => {
                    u.feed(&mut hasher, &dyadic_grid());
                    v.feed(&mut hasher, &dyadic_grid());
                }
                ProbeCase::Trilinear { inputs, .. } => {
                    for f in inputs {
                        f.feed(&mut hasher, &trilinear_grid());
                    }
                }
            }
        }
        hasher
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

/// Seed of the norm corpus.
pub const NORM_CORPUS_SEED: u64 = 0x6e6f_726d;

/// 100 fields on [`cube_grid`]: 60 random band-limited fields with random
/// bands inside `[-40, 40]` and 40 solitons with carriers in `[-30, 30]` and
/// scales in `[0.8, 3]`.
pub fn norm_corpus(seed: u64) -> Result<Vec<Field>> {
    let grid = cube_grid();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fields = Vec::with_capacity(100);
    for _ in 0..60 {
        let lo: f64 = rng.random_range(-40.0..36.0);
        let width: f64 = rng.random_range(1.0..(40.0 - lo).min(40.0));
        fields.push(random_band_field(&grid, lo, lo + width, rng.random())?);
    }
    for _ in 0..40 {
        let carrier: f64 = rng.random_range(-30.0..30.0);
        let scale: f64 = rng.random_range(0.8..3.0);
        fields.push(soliton_field(&SolitonParams::new(carrier, scale)?, 0.0, &grid)?);
    }
    Ok(fields)
}
