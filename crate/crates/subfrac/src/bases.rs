//! Concrete spectral decompositions diagonalizing the elliptic operator:
//! the N-torus with a homogeneous constant-coefficient symbol, and the
//! 1-D Dirichlet sine basis on (0, π).
//!
//! Torus eigenfunctions are (2π)^{−N/2}e^{in·x} with eigenvalues
//! A(n) = Σ_{|α|=m} a_α(in)^α, enumerated over |n|_∞ ≤ K and sorted by
//! eigenvalue (lexicographic index order breaks ties). The sine basis
//! has v_k = √(2/π)·sin(kx) and λ_k = k². Transforms are FFT-based on
//! the grid x_j = −π + 2πj/G (torus) and x_i = iπ/(G+1) (sine, via the
//! odd extension of length 2(G+1)); both are exact on band-limited data
//! when G ≥ 2K+2, and analysis refuses coarser grids outright rather
//! than aliasing silently.
//!
//! A(0) = 0 for every homogeneous symbol, so the torus zero mode rides
//! the λ = 0 kernel branch in the solver; it is enumerated like any
//! other mode, never dropped.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::{Error, Result};

/// Constant-coefficient elliptic operator Σ_{|α|=m} a_α D^α on the
/// torus, identified by its symbol A(n) = Σ a_α (in)^α.
#[derive(Debug, Clone)]
pub struct EllipticSymbol {
    dimension: usize,
    order: u32,
    /// (multi-index α, coefficient a_α), every |α| = m
    coefficients: Vec<(Vec<u32>, f64)>,
}

/// Lattice box the symbol is screened on at construction time.
const PROBE_EXTENT: i64 = 8;

impl EllipticSymbol {
    pub fn new(dimension: usize, order: u32, coefficients: Vec<(Vec<u32>, f64)>) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::Domain("symbol: dimension must be at least 1".into()));
        }
        if order < 2 || order % 2 != 0 {
            return Err(Error::Domain(format!(
                "symbol: order must be even and at least 2, got {order}"
            )));
        }
        if coefficients.is_empty() {
            return Err(Error::Domain("symbol: no coefficients".into()));
        }
        for (alpha, a) in &coefficients {
            if alpha.len() != dimension {
                return Err(Error::Domain(format!(
                    "symbol: multi-index {alpha:?} has {} entries for dimension {dimension}",
                    alpha.len()
                )));
            }
            if alpha.iter().sum::<u32>() != order {
                return Err(Error::Domain(format!(
                    "symbol: multi-index {alpha:?} has degree {} but the order is {order}",
                    alpha.iter().sum::<u32>()
                )));
            }
            if !a.is_finite() {
                return Err(Error::Domain("symbol: coefficients must be finite".into()));
            }
        }
        let sym = Self { dimension, order, coefficients };
        sym.validate_lattice(PROBE_EXTENT)?;
        Ok(sym)
    }

    /// −Δ in the given dimension: a_{2e_j} = −1.
    pub fn laplacian(dimension: usize) -> Self {
        let coefficients = (0..dimension)
            .map(|j| {
                let mut alpha = vec![0u32; dimension];
                alpha[j] = 2;
                (alpha, -1.0)
            })
            .collect();
        Self::new(dimension, 2, coefficients).expect("the Laplacian symbol is valid")
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// A(n) = Σ a_α (in)^α = (−1)^{m/2} Σ a_α n^α.
    pub fn eval(&self, n: &[i64]) -> f64 {
        debug_assert_eq!(n.len(), self.dimension);
        let sign = if (self.order / 2) % 2 == 0 { 1.0 } else { -1.0 };
        let mut acc = 0.0;
        for (alpha, a) in &self.coefficients {
            let mut p = 1.0f64;
            for (&nj, &aj) in n.iter().zip(alpha) {
                p *= (nj as f64).powi(aj as i32);
            }
            acc += a * p;
        }
        sign * acc
    }

    /// Literal Σ a_α (in)^α in complex arithmetic; the imaginary part
    /// must vanish for a symmetric symbol.
    fn eval_complex(&self, n: &[i64]) -> Complex64 {
        let i = Complex64::new(0.0, 1.0);
        let mut acc = Complex64::new(0.0, 0.0);
        for (alpha, a) in &self.coefficients {
            let mut p = Complex64::new(*a, 0.0);
            for (&nj, &aj) in n.iter().zip(alpha) {
                p *= (i * nj as f64).powu(aj);
            }
            acc += p;
        }
        acc
    }

    /// Realness and positivity screen over |n|_∞ ≤ extent.
    fn validate_lattice(&self, extent: i64) -> Result<()> {
        let mut n = vec![-extent; self.dimension];
        loop {
            let z = self.eval_complex(&n);
            if z.im.abs() > 1e-12 * (1.0 + z.re.abs()) {
                return Err(Error::Domain(format!(
                    "symbol: A({n:?}) = {z} is not real; the symbol is not symmetric"
                )));
            }
            let v = self.eval(&n);
            if n.iter().all(|&c| c == 0) {
                if v != 0.0 {
                    return Err(Error::Domain(format!(
                        "symbol: A(0) = {v} instead of 0; the symbol is not homogeneous"
                    )));
                }
            } else if !(v > 0.0) {
                return Err(Error::Domain(format!(
                    "symbol: A({n:?}) = {v} is not positive; the symbol is not elliptic"
                )));
            }
            if !advance(&mut n, -extent, extent) {
                return Ok(());
            }
        }
    }
}

/// Odometer step through the lattice [lo, hi]^N in lexicographic order.
fn advance(n: &mut [i64], lo: i64, hi: i64) -> bool {
    for j in (0..n.len()).rev() {
        if n[j] < hi {
            n[j] += 1;
            return true;
        }
        n[j] = lo;
    }
    false
}

/// One enumerated eigenpair: lattice index (length N; the sine basis
/// stores [k]) and its eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct Mode {
    pub index: Vec<i64>,
    pub lambda: f64,
}

#[derive(Debug, Clone)]
enum Kind {
    Torus(EllipticSymbol),
    DirichletSine,
}

/// Validated basis with its eigenpairs enumerated and sorted.
#[derive(Debug, Clone)]
pub struct SpectralBasis {
    kind: Kind,
    cutoff: u32,
    dimension: usize,
    modes: Vec<Mode>,
}

/// Real field reconstructed from coefficients, with the largest
/// imaginary residue left over by the complex arithmetic.
#[derive(Debug, Clone)]
pub struct SynthesizedField {
    pub values: Vec<f64>,
    pub imag_residue: f64,
}

/// Finite-cutoff view of the D(Â^τ) membership test.
#[derive(Debug, Clone, Copy)]
pub struct MembershipReport {
    pub tau: f64,
    /// N/(2m): the hypothesis is τ > threshold.
    pub threshold: f64,
    pub hypothesis_met: bool,
    /// Σ λ_n^{2τ}|g_n|² over the cutoff lattice.
    pub weighted_sum: f64,
    /// Mass of the outermost shell |n|_∞ = K; flat or growing shells
    /// mean the finite sum certifies nothing.
    pub last_shell_mass: f64,
}

impl SpectralBasis {
    pub fn torus(symbol: EllipticSymbol, cutoff: u32) -> Result<Self> {
        if cutoff == 0 {
            return Err(Error::Domain("basis: cutoff must be at least 1".into()));
        }
        let k = cutoff as i64;
        symbol.validate_lattice(k)?;
        let dimension = symbol.dimension();
        let mut modes = Vec::with_capacity((2 * cutoff as usize + 1).pow(dimension as u32));
        let mut n = vec![-k; dimension];
        loop {
            modes.push(Mode { index: n.clone(), lambda: symbol.eval(&n) });
            if !advance(&mut n, -k, k) {
                break;
            }
        }
        sort_modes(&mut modes);
        Ok(Self { kind: Kind::Torus(symbol), cutoff, dimension, modes })
    }

    pub fn dirichlet_sine(cutoff: u32) -> Result<Self> {
        if cutoff == 0 {
            return Err(Error::Domain("basis: cutoff must be at least 1".into()));
        }
        let modes = (1..=cutoff as i64)
            .map(|k| Mode { index: vec![k], lambda: (k * k) as f64 })
            .collect();
        Ok(Self { kind: Kind::DirichletSine, cutoff, dimension: 1, modes })
    }

    pub fn is_torus(&self) -> bool {
        matches!(self.kind, Kind::Torus(_))
    }

    pub fn symbol(&self) -> Option<&EllipticSymbol> {
        match &self.kind {
            Kind::Torus(s) => Some(s),
            Kind::DirichletSine => None,
        }
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Eigenpairs sorted ascending by λ, ties in lexicographic index
    /// order; coefficient vectors follow this enumeration.
    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    /// N/(2m): the series-convergence hypothesis asks for τ above this.
    pub fn membership_threshold(&self) -> f64 {
        let m = match &self.kind {
            Kind::Torus(s) => s.order() as f64,
            Kind::DirichletSine => 2.0,
        };
        self.dimension as f64 / (2.0 * m)
    }

    /// sup_x|v_n(x)|, the same for every mode of the family.
    pub fn eigenfunction_sup(&self) -> f64 {
        match self.kind {
            Kind::Torus(_) => (2.0 * std::f64::consts::PI).powf(-(self.dimension as f64) / 2.0),
            Kind::DirichletSine => (2.0 / std::f64::consts::PI).sqrt(),
        }
    }

    /// Uniform probe lattice with `per_axis` points per axis: torus
    /// points cover [−π, π), sine points the interior of (0, π).
    pub fn probe_points(&self, per_axis: usize) -> Vec<Vec<f64>> {
        let axis: Vec<f64> = match self.kind {
            Kind::Torus(_) => (0..per_axis)
                .map(|j| {
                    -std::f64::consts::PI
                        + 2.0 * std::f64::consts::PI * j as f64 / per_axis as f64
                })
                .collect(),
            Kind::DirichletSine => (1..=per_axis)
                .map(|i| std::f64::consts::PI * i as f64 / (per_axis as f64 + 1.0))
                .collect(),
        };
        let n = self.dimension;
        let mut pts = Vec::with_capacity(per_axis.pow(n as u32));
        let mut idx = vec![0usize; n];
        loop {
            pts.push(idx.iter().map(|&i| axis[i]).collect());
            let mut j = n;
            loop {
                if j == 0 {
                    return pts;
                }
                j -= 1;
                idx[j] += 1;
                if idx[j] < per_axis {
                    break;
                }
                idx[j] = 0;
            }
        }
    }

    /// Smallest alias-free grid edge for analysis.
    pub fn min_grid(&self) -> usize {
        2 * self.cutoff as usize + 2
    }

    /// Default grid edge: ×2 oversampled beyond the alias limit.
    pub fn default_grid(&self) -> usize {
        4 * (self.cutoff as usize + 1)
    }

    /// Grid coordinates along one axis: G torus points −π + 2πj/G, or
    /// the G interior sine points iπ/(G+1).
    pub fn axis_points(&self, grid: usize) -> Vec<f64> {
        match self.kind {
            Kind::Torus(_) => (0..grid)
                .map(|j| -std::f64::consts::PI + 2.0 * std::f64::consts::PI * j as f64 / grid as f64)
                .collect(),
            Kind::DirichletSine => (1..=grid)
                .map(|i| std::f64::consts::PI * i as f64 / (grid as f64 + 1.0))
                .collect(),
        }
    }

    /// Total sample count of the N-dimensional grid (C order, last axis
    /// fastest).
    pub fn grid_len(&self, grid: usize) -> usize {
        grid.pow(self.dimension as u32)
    }

    fn check_grid(&self, grid: usize, samples: usize) -> Result<()> {
        if grid < self.min_grid() {
            return Err(Error::GridTooCoarse(format!(
                "basis: grid edge {grid} aliases cutoff {}; need at least {}",
                self.cutoff,
                self.min_grid()
            )));
        }
        let want = self.grid_len(grid);
        if samples != want {
            return Err(Error::Domain(format!(
                "basis: {samples} samples for a {grid}^{} grid of {want}",
                self.dimension
            )));
        }
        Ok(())
    }

    /// Forward transform of complex samples on the torus grid.
    pub fn analyze_complex(&self, samples: &[Complex64], grid: usize) -> Result<CoefficientVector> {
        self.check_grid(grid, samples.len())?;
        match &self.kind {
            Kind::Torus(_) => {
                let mut data = samples.to_vec();
                let dims = vec![grid; self.dimension];
                fft_axes(&mut data, &dims, false);
                let norm = (2.0 * std::f64::consts::PI).powf(self.dimension as f64 / 2.0)
                    / grid.pow(self.dimension as u32) as f64;
                let values = self
                    .modes
                    .iter()
                    .map(|m| {
                        let mut flat = 0usize;
                        let mut parity = 0i64;
                        for &nj in &m.index {
                            flat = flat * grid + nj.rem_euclid(grid as i64) as usize;
                            parity += nj;
                        }
                        let sign = if parity.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                        data[flat] * (norm * sign)
                    })
                    .collect();
                Ok(CoefficientVector { values })
            }
            Kind::DirichletSine => Err(Error::Domain(
                "basis: the sine basis holds real data; use analyze".into(),
            )),
        }
    }

    /// Forward transform of real samples.
    pub fn analyze(&self, samples: &[f64], grid: usize) -> Result<CoefficientVector> {
        match &self.kind {
            Kind::Torus(_) => {
                let complex: Vec<Complex64> =
                    samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
                self.analyze_complex(&complex, grid)
            }
            Kind::DirichletSine => {
                self.check_grid(grid, samples.len())?;
                // odd extension of length L = 2(G+1):
                // Σ_{i=1}^G u_i sin(kiπ/(G+1)) = −Im(FFT_k)/2
                let l = 2 * (grid + 1);
                let mut data = vec![Complex64::new(0.0, 0.0); l];
                for (i, &u) in samples.iter().enumerate() {
                    data[i + 1] = Complex64::new(u, 0.0);
                    data[l - 1 - i] = Complex64::new(-u, 0.0);
                }
                FftPlanner::new().plan_fft_forward(l).process(&mut data);
                let scale = (2.0 / std::f64::consts::PI).sqrt() * std::f64::consts::PI
                    / (grid as f64 + 1.0);
                let values = self
                    .modes
                    .iter()
                    .map(|m| {
                        let k = m.index[0] as usize;
                        Complex64::new(scale * (-data[k].im / 2.0), 0.0)
                    })
                    .collect();
                Ok(CoefficientVector { values })
            }
        }
    }

    /// Inverse transform onto the grid, complex output.
    pub fn synthesize_complex(
        &self,
        coeffs: &CoefficientVector,
        grid: usize,
    ) -> Result<Vec<Complex64>> {
        self.check_len(coeffs)?;
        if grid < self.min_grid() {
            return Err(Error::GridTooCoarse(format!(
                "basis: grid edge {grid} cannot carry cutoff {}; need at least {}",
                self.cutoff,
                self.min_grid()
            )));
        }
        match &self.kind {
            Kind::Torus(_) => {
                let total = self.grid_len(grid);
                let mut data = vec![Complex64::new(0.0, 0.0); total];
                let norm = (2.0 * std::f64::consts::PI).powf(-(self.dimension as f64) / 2.0);
                for (m, &c) in self.modes.iter().zip(&coeffs.values) {
                    let mut flat = 0usize;
                    let mut parity = 0i64;
                    for &nj in &m.index {
                        flat = flat * grid + nj.rem_euclid(grid as i64) as usize;
                        parity += nj;
                    }
                    let sign = if parity.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                    data[flat] += c * (norm * sign);
                }
                let dims = vec![grid; self.dimension];
                fft_axes(&mut data, &dims, true);
                Ok(data)
            }
            Kind::DirichletSine => {
                let field = self.synthesize(coeffs, grid)?;
                Ok(field.values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
            }
        }
    }

    /// Inverse transform onto the grid for real fields.
    pub fn synthesize(&self, coeffs: &CoefficientVector, grid: usize) -> Result<SynthesizedField> {
        match &self.kind {
            Kind::Torus(_) => {
                let data = self.synthesize_complex(coeffs, grid)?;
                let imag_residue = data.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
                Ok(SynthesizedField {
                    values: data.iter().map(|z| z.re).collect(),
                    imag_residue,
                })
            }
            Kind::DirichletSine => {
                self.check_len(coeffs)?;
                if grid < self.min_grid() {
                    return Err(Error::GridTooCoarse(format!(
                        "basis: grid edge {grid} cannot carry cutoff {}",
                        self.cutoff
                    )));
                }
                // inverse DST through the same odd extension
                let l = 2 * (grid + 1);
                let mut data = vec![Complex64::new(0.0, 0.0); l];
                let scale = (2.0 / std::f64::consts::PI).sqrt();
                for (m, c) in self.modes.iter().zip(&coeffs.values) {
                    let k = m.index[0] as usize;
                    // u(x) contribution c·√(2/π)sin(kx): spectral line at
                    // ±k of the extension, e^{ikx} coefficient c·scale/(2i)
                    let amp = Complex64::new(0.0, -0.5) * scale * c;
                    data[k] += amp;
                    data[l - k] -= amp;
                }
                FftPlanner::new().plan_fft_inverse(l).process(&mut data);
                let imag_residue = (1..=grid).map(|i| data[i].im.abs()).fold(0.0, f64::max);
                Ok(SynthesizedField {
                    values: (1..=grid).map(|i| data[i].re).collect(),
                    imag_residue,
                })
            }
        }
    }

    /// Eigenfunction value at a point: (2π)^{−N/2}e^{in·x} or
    /// √(2/π)sin(kx).
    pub fn eigenfunction(&self, mode: usize, x: &[f64]) -> Result<Complex64> {
        if x.len() != self.dimension {
            return Err(Error::Domain(format!(
                "basis: point has {} coordinates in dimension {}",
                x.len(),
                self.dimension
            )));
        }
        let m = self
            .modes
            .get(mode)
            .ok_or_else(|| Error::Domain(format!("basis: mode {mode} out of range")))?;
        match self.kind {
            Kind::Torus(_) => {
                let phase: f64 = m.index.iter().zip(x).map(|(&n, &xi)| n as f64 * xi).sum();
                let norm = (2.0 * std::f64::consts::PI).powf(-(self.dimension as f64) / 2.0);
                Ok(Complex64::from_polar(1.0, phase) * norm)
            }
            Kind::DirichletSine => {
                let k = m.index[0] as f64;
                Ok(Complex64::new((2.0 / std::f64::consts::PI).sqrt() * (k * x[0]).sin(), 0.0))
            }
        }
    }

    /// Direct series evaluation Σ g_n v_n(x) at one point.
    pub fn evaluate(&self, coeffs: &CoefficientVector, x: &[f64]) -> Result<Complex64> {
        self.check_len(coeffs)?;
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, &c) in coeffs.values.iter().enumerate() {
            if c != Complex64::new(0.0, 0.0) {
                acc += c * self.eigenfunction(i, x)?;
            }
        }
        Ok(acc)
    }

    fn check_len(&self, coeffs: &CoefficientVector) -> Result<()> {
        if coeffs.values.len() != self.modes.len() {
            return Err(Error::Domain(format!(
                "basis: coefficient vector of length {} against {} modes",
                coeffs.values.len(),
                self.modes.len()
            )));
        }
        Ok(())
    }

    /// ‖g‖_{L₂^a} = sqrt(Σ (1+|n|²)^a |g_n|²).
    pub fn sobolev_norm(&self, coeffs: &CoefficientVector, a: f64) -> Result<f64> {
        self.check_len(coeffs)?;
        let mut acc = 0.0;
        for (m, c) in self.modes.iter().zip(&coeffs.values) {
            let n2: f64 = m.index.iter().map(|&n| (n * n) as f64).sum();
            acc += (1.0 + n2).powf(a) * c.norm_sqr();
        }
        Ok(acc.sqrt())
    }

    /// Finite-cutoff D(Â^τ) membership diagnostic: the weighted sum
    /// Σ λ^{2τ}|g_n|², the τ·m > N/2 hypothesis check, and the mass of
    /// the outermost frequency shell.
    pub fn domain_membership(&self, coeffs: &CoefficientVector, tau: f64) -> Result<MembershipReport> {
        self.check_len(coeffs)?;
        if !(tau > 0.0) {
            return Err(Error::Domain(format!("basis: tau must be positive, got {tau}")));
        }
        let threshold = self.membership_threshold();
        let mut weighted_sum = 0.0;
        let mut last_shell_mass = 0.0;
        let outer = self.cutoff as i64;
        for (m, c) in self.modes.iter().zip(&coeffs.values) {
            let w = m.lambda.powf(2.0 * tau) * c.norm_sqr();
            weighted_sum += w;
            if m.index.iter().map(|n| n.abs()).max() == Some(outer) {
                last_shell_mass += w;
            }
        }
        Ok(MembershipReport {
            tau,
            threshold,
            hypothesis_met: tau > threshold,
            weighted_sum,
            last_shell_mass,
        })
    }
}

fn sort_modes(modes: &mut [Mode]) {
    modes.sort_by(|a, b| {
        a.lambda
            .partial_cmp(&b.lambda)
            .expect("eigenvalues are finite")
            .then_with(|| a.index.cmp(&b.index))
    });
}

/// Coefficients in the basis's mode enumeration order; real bases keep
/// zero imaginary parts.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientVector {
    pub values: Vec<Complex64>,
}

impl CoefficientVector {
    pub fn zeros(basis: &SpectralBasis) -> Self {
        Self { values: vec![Complex64::new(0.0, 0.0); basis.modes().len()] }
    }

    pub fn from_real(values: Vec<f64>) -> Self {
        Self { values: values.into_iter().map(|v| Complex64::new(v, 0.0)).collect() }
    }

    /// Largest |g_{−n} − conj(g_n)| over the lattice; zero for vectors
    /// representing real torus data.
    pub fn hermitian_residue(&self, basis: &SpectralBasis) -> Result<f64> {
        basis.check_len(self)?;
        if !basis.is_torus() {
            return Ok(0.0);
        }
        let mut pos: std::collections::HashMap<&[i64], usize> = Default::default();
        for (i, m) in basis.modes().iter().enumerate() {
            pos.insert(&m.index, i);
        }
        let mut worst = 0.0f64;
        for (i, m) in basis.modes().iter().enumerate() {
            let neg: Vec<i64> = m.index.iter().map(|&n| -n).collect();
            let j = pos[neg.as_slice()];
            worst = worst.max((self.values[j] - self.values[i].conj()).norm());
        }
        Ok(worst)
    }
}

/// Empirical sandwich constants of 1+A^{2τ}(n) against (1+|n|²)^{τm}
/// over the lattice |n|_∞ ≤ K: returns (min, max) of the ratio. Both
/// stabilize as K grows for an elliptic symbol; a positivity defect
/// would drive the min toward 0.
pub fn equivalence_constants(sym: &EllipticSymbol, tau: f64, cutoff: u32) -> Result<(f64, f64)> {
    if !(tau > 0.0) {
        return Err(Error::Domain(format!(
            "equivalence: tau must be positive, got {tau} (ratio degenerates at τ = 0)"
        )));
    }
    if cutoff == 0 {
        return Err(Error::Domain("equivalence: cutoff must be at least 1".into()));
    }
    let k = cutoff as i64;
    let tm = tau * sym.order() as f64;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut n = vec![-k; sym.dimension()];
    loop {
        let a = sym.eval(&n);
        let n2: f64 = n.iter().map(|&c| (c * c) as f64).sum();
        let ratio = (1.0 + a.powf(2.0 * tau)) / (1.0 + n2).powf(tm);
        lo = lo.min(ratio);
        hi = hi.max(ratio);
        if !advance(&mut n, -k, k) {
            break;
        }
    }
    Ok((lo, hi))
}

/// Unnormalized FFT along every axis of a C-order array: forward is
/// Σ e^{−2πi jk/G}, inverse Σ e^{+2πi jk/G} (no 1/G factor).
fn fft_axes(data: &mut [Complex64], dims: &[usize], inverse: bool) {
    let mut planner = FftPlanner::new();
    let total: usize = dims.iter().product();
    debug_assert_eq!(data.len(), total);
    for (axis, &g) in dims.iter().enumerate() {
        let fft = if inverse {
            planner.plan_fft_inverse(g)
        } else {
            planner.plan_fft_forward(g)
        };
        // stride of this axis and the block size it repeats over
        let inner: usize = dims[axis + 1..].iter().product();
        let outer: usize = dims[..axis].iter().product();
        let mut line = vec![Complex64::new(0.0, 0.0); g];
        for o in 0..outer {
            for i in 0..inner {
                let base = o * g * inner + i;
                for j in 0..g {
                    line[j] = data[base + j * inner];
                }
                fft.process(&mut line);
                for j in 0..g {
                    data[base + j * inner] = line[j];
                }
            }
        }
    }
}
