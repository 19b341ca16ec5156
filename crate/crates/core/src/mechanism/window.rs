use super::{check_input, draw_noise, MechanismKind, PrivacyParams, StreamingMechanism};
use crate::error::Result;
use crate::toeplitz::{build_block_factor, BlockFactor};

/// Sliding-window sums `Σ_{i=max(1,t−w+1)}^{t} x_i` from the block-diagonal
/// factorization `L′ = diag(L₁, …)`, `L₁·L₁ = ` all-ones triangle of size `w`.
///
/// `u = L′(L′x + b)` holds noisy prefix sums restarted at every block
/// boundary. A window ending at `t` (offset `o` in its block, 0-based) covers
/// the head of the current block and the tail of the previous one, so for
/// `t ≥ w` the output is `u[t] + u[t − o − 1] − u[t − w]`; when `t` closes a
/// block this collapses to `u[t]`.
#[derive(Debug, Clone)]
pub struct SlidingWindowMechanism {
    blocks: BlockFactor,
    privacy: PrivacyParams,
    base_noise: Vec<f64>,
    inputs: Vec<f64>,
    inner: Vec<f64>,
    prefix: Vec<f64>,
    clip_events: usize,
}

impl SlidingWindowMechanism {
    pub fn new(window: usize, horizon: usize, privacy: PrivacyParams, seed: u64) -> Result<Self> {
        let blocks = build_block_factor(window, horizon)?;
        let std = privacy.effective_multiplier()
            * privacy.clip_bound()
            * blocks.base_factor().column_norm();
        Ok(Self {
            base_noise: draw_noise(seed, horizon, std),
            blocks,
            privacy,
            inputs: Vec::with_capacity(horizon),
            inner: Vec::with_capacity(horizon),
            prefix: Vec::with_capacity(horizon),
            clip_events: 0,
        })
    }

    pub fn blocks(&self) -> &BlockFactor {
        &self.blocks
    }

    pub fn base_noise_std(&self) -> f64 {
        self.privacy.effective_multiplier()
            * self.privacy.clip_bound()
            * self.blocks.base_factor().column_norm()
    }
}

impl StreamingMechanism for SlidingWindowMechanism {
    fn kind(&self) -> MechanismKind {
        MechanismKind::SlidingWindow
    }

    fn step(&mut self, x: f64) -> Result<f64> {
        let t = self.inputs.len();
        check_input(t, self.blocks.horizon(), x)?;
        let (x, clipped) = self.privacy.clamp(x);
        self.clip_events += usize::from(clipped);
        self.inputs.push(x);
        let v = self.blocks.row_dot(t, &self.inputs) + self.base_noise[t];
        self.inner.push(v);
        let u = self.blocks.row_dot(t, &self.inner);
        self.prefix.push(u);

        let w = self.blocks.window();
        if t < w {
            return Ok(u);
        }
        let (start, _) = self.blocks.locate(t);
        Ok(u + self.prefix[start - 1] - self.prefix[t - w])
    }

    fn horizon(&self) -> usize {
        self.blocks.horizon()
    }

    fn time(&self) -> usize {
        self.inputs.len()
    }

    fn clip_events(&self) -> usize {
        self.clip_events
    }

    fn output_noise_variance(&self, t: usize) -> f64 {
        let r = self.blocks.base_factor().first_column();
        let w = self.blocks.window();
        let (_, offset) = self.blocks.locate(t);
        let mut coeff: f64 = r[..=offset].iter().map(|v| v * v).sum();
        if t >= w {
            // Row w−1 minus row `offset` of L₁, both from the previous (full) block.
            coeff += (0..w)
                .map(|j| {
                    let end = r[w - 1 - j];
                    let mid = if j <= offset { r[offset - j] } else { 0.0 };
                    (end - mid).powi(2)
                })
                .sum::<f64>();
        }
        self.base_noise_std().powi(2) * coeff
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn noiseless() -> PrivacyParams {
        PrivacyParams::new(0.5, 1e-5, 1.0).unwrap().unsafe_no_privacy()
    }

    fn window_sums(x: &[f64], w: usize) -> Vec<f64> {
        (0..x.len()).map(|t| x[t.saturating_sub(w - 1)..=t].iter().sum()).collect()
    }

    #[test]
    fn window_of_two_on_ones() {
        let mut m = SlidingWindowMechanism::new(2, 4, noiseless(), 0).unwrap();
        let out = m.run(&[1.0; 4]).unwrap();
        assert!(out.iter().zip([1.0, 2.0, 2.0, 2.0]).all(|(o, w)| (o - w).abs() < 1e-12), "{out:?}");
    }

    #[test]
    fn full_window_is_prefix_sums() {
        let x = [0.5, -1.0, 1.0, 0.25, 0.75];
        let mut m = SlidingWindowMechanism::new(5, 5, noiseless(), 0).unwrap();
        let out = m.run(&x).unwrap();
        let mut acc = 0.0;
        for (o, v) in out.iter().zip(x) {
            acc += v;
            assert!((o - acc).abs() < 1e-12);
        }
    }

    #[test]
    fn matches_window_oracle_with_tail_block() {
        let x: Vec<f64> = (0..23).map(|i| ((i * 7 % 11) as f64 - 5.0) / 5.0).collect();
        for w in [1, 3, 4, 7, 23] {
            let mut m = SlidingWindowMechanism::new(w, x.len(), noiseless(), 0).unwrap();
            let out = m.run(&x).unwrap();
            for (t, (o, want)) in out.iter().zip(window_sums(&x, w)).enumerate() {
                assert!((o - want).abs() < 1e-12, "w = {w}, t = {t}: {o} vs {want}");
            }
        }
    }

    #[test]
    fn variance_formula_matches_dense_covariance() {
        // Build the output noise as an explicit linear map of b and compare.
        let (w, horizon) = (4, 11);
        let p = PrivacyParams::new(1.0, 1e-5, 1.0).unwrap();
        let m = SlidingWindowMechanism::new(w, horizon, p, 0).unwrap();
        let mut rows = Vec::new();
        for i in 0..horizon {
            let mut e = vec![0.0; horizon];
            e[i] = 1.0;
            rows.push(m.blocks().matvec(&e).unwrap());
        }
        // z[t] = Σ_i L′[t, i] b[i]; column i of L′ is rows[i].
        let z_coeff = |t: usize| -> Vec<f64> { (0..horizon).map(|i| rows[i][t]).collect() };
        let std2 = m.base_noise_std().powi(2);
        for t in 0..horizon {
            let mut c = z_coeff(t);
            if t >= w {
                let (start, _) = m.blocks().locate(t);
                let prev_end = z_coeff(start - 1);
                let back = z_coeff(t - w);
                for i in 0..horizon {
                    c[i] += prev_end[i] - back[i];
                }
            }
            let want = std2 * c.iter().map(|v| v * v).sum::<f64>();
            let got = m.output_noise_variance(t);
            assert!((got - want).abs() <= 1e-12 * want, "t = {t}");
        }
    }
}
