//! Mixed-radix discrete Fourier transform over `Complex64`.
//!
//! Sizes are arbitrary; factors 2, 3, 4 and 5 use dedicated butterflies and
//! any remaining prime factor falls back to a direct combine, so the smooth
//! block sizes used elsewhere in the crate (480, 4800) stay fast while
//! nothing is rejected. A [`FftPlan`] caches the twiddle table for one size
//! and is immutable after construction, so plans can be shared freely
//! across threads.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::TAU;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

const SQRT3_OVER_2: f64 = 0.866_025_403_784_438_6;
const COS_TAU_5: f64 = 0.309_016_994_374_947_42;
const SIN_TAU_5: f64 = 0.951_056_516_295_153_5;
const COS_2TAU_5: f64 = -0.809_016_994_374_947_5;
const SIN_2TAU_5: f64 = 0.587_785_252_292_473_1;

/// Precomputed transform of one fixed length.
pub struct FftPlan {
    len: usize,
    /// `exp(-2πi·k/len)` for `k` in `0..len`.
    twiddles: Vec<Complex64>,
}

impl FftPlan {
    pub fn new(len: usize) -> Self {
        assert!(len >= 1, "transform length must be at least 1");
        let twiddles = (0..len)
            .map(|k| {
                let theta = -TAU * k as f64 / len as f64;
                Complex64::new(theta.cos(), theta.sin())
            })
            .collect();
        Self { len, twiddles }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Forward transform, `X[k] = Σ_n x[n]·exp(-2πi·kn/N)`.
    pub fn forward(&self, input: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(input.len(), self.len, "input length does not match plan");
        let mut out = vec![Complex64::ZERO; self.len];
        let mut scratch = vec![Complex64::ZERO; self.len];
        self.fft_rec(input, 0, 1, &mut out, &mut scratch);
        out
    }

    /// Forward transform of a real sequence.
    pub fn forward_real(&self, input: &[f64]) -> Vec<Complex64> {
        let complex: Vec<Complex64> = input.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.forward(&complex)
    }

    /// Inverse transform including the `1/N` scale,
    /// `x[n] = (1/N)·Σ_k X[k]·exp(+2πi·kn/N)`.
    pub fn inverse(&self, input: &[Complex64]) -> Vec<Complex64> {
        let conjugated: Vec<Complex64> = input.iter().map(|c| c.conj()).collect();
        let mut out = self.forward(&conjugated);
        let scale = 1.0 / self.len as f64;
        for v in &mut out {
            *v = Complex64::new(v.re * scale, -v.im * scale);
        }
        out
    }

    /// Decimation-in-time recursion. Sub-transform results land in `out`;
    /// the combine pass writes into `scratch` and copies back.
    fn fft_rec(
        &self,
        input: &[Complex64],
        offset: usize,
        stride: usize,
        out: &mut [Complex64],
        scratch: &mut [Complex64],
    ) {
        let n = out.len();
        if n == 1 {
            out[0] = input[offset];
            return;
        }
        let radix = choose_radix(n);
        let m = n / radix;

        for (r, (out_chunk, scratch_chunk)) in out
            .chunks_exact_mut(m)
            .zip(scratch.chunks_exact_mut(m))
            .enumerate()
        {
            self.fft_rec(input, offset + r * stride, stride * radix, out_chunk, scratch_chunk);
        }

        // Twiddle each sub-result: out[r*m + k] *= w^(r*k*step), w = exp(-2πi/len).
        let step = self.len / n;
        for r in 1..radix {
            let inc = r * step;
            let mut idx = 0usize;
            for k in 0..m {
                out[r * m + k] *= self.twiddles[idx];
                idx += inc;
                if idx >= self.len {
                    idx -= self.len;
                }
            }
        }

        match radix {
            2 => {
                for k in 0..m {
                    let a0 = out[k];
                    let a1 = out[m + k];
                    scratch[k] = a0 + a1;
                    scratch[m + k] = a0 - a1;
                }
            }
            3 => {
                for k in 0..m {
                    let a0 = out[k];
                    let a1 = out[m + k];
                    let a2 = out[2 * m + k];
                    let u = a1 + a2;
                    let v = a1 - a2;
                    let t = a0 - 0.5 * u;
                    // -i·(√3/2)·v
                    let s = Complex64::new(SQRT3_OVER_2 * v.im, -SQRT3_OVER_2 * v.re);
                    scratch[k] = a0 + u;
                    scratch[m + k] = t + s;
                    scratch[2 * m + k] = t - s;
                }
            }
            4 => {
                for k in 0..m {
                    let a0 = out[k];
                    let a1 = out[m + k];
                    let a2 = out[2 * m + k];
                    let a3 = out[3 * m + k];
                    let t0 = a0 + a2;
                    let t1 = a0 - a2;
                    let t2 = a1 + a3;
                    let t3 = a1 - a3;
                    // -i·t3
                    let jt3 = Complex64::new(t3.im, -t3.re);
                    scratch[k] = t0 + t2;
                    scratch[m + k] = t1 + jt3;
                    scratch[2 * m + k] = t0 - t2;
                    scratch[3 * m + k] = t1 - jt3;
                }
            }
            5 => {
                for k in 0..m {
                    let a0 = out[k];
                    let a1 = out[m + k];
                    let a2 = out[2 * m + k];
                    let a3 = out[3 * m + k];
                    let a4 = out[4 * m + k];
                    let t1 = a1 + a4;
                    let t2 = a1 - a4;
                    let t3 = a2 + a3;
                    let t4 = a2 - a3;
                    let m1 = a0 + COS_TAU_5 * t1 + COS_2TAU_5 * t3;
                    let m2 = a0 + COS_2TAU_5 * t1 + COS_TAU_5 * t3;
                    let n1 = SIN_TAU_5 * t2 + SIN_2TAU_5 * t4;
                    let n2 = SIN_2TAU_5 * t2 - SIN_TAU_5 * t4;
                    scratch[k] = a0 + t1 + t3;
                    scratch[m + k] = Complex64::new(m1.re + n1.im, m1.im - n1.re);
                    scratch[2 * m + k] = Complex64::new(m2.re + n2.im, m2.im - n2.re);
                    scratch[3 * m + k] = Complex64::new(m2.re - n2.im, m2.im + n2.re);
                    scratch[4 * m + k] = Complex64::new(m1.re - n1.im, m1.im + n1.re);
                }
            }
            p => {
                // Direct combine for any remaining prime factor.
                let w_step = self.len / p;
                let mut gathered = vec![Complex64::ZERO; p];
                for k in 0..m {
                    for (r, g) in gathered.iter_mut().enumerate() {
                        *g = out[r * m + k];
                    }
                    for k2 in 0..p {
                        let inc = (k2 * w_step) % self.len;
                        let mut acc = gathered[0];
                        let mut idx = 0usize;
                        for &g in gathered.iter().skip(1) {
                            idx += inc;
                            if idx >= self.len {
                                idx -= self.len;
                            }
                            acc += g * self.twiddles[idx];
                        }
                        scratch[k2 * m + k] = acc;
                    }
                }
            }
        }

        out.copy_from_slice(scratch);
    }
}

fn choose_radix(n: usize) -> usize {
    if n % 4 == 0 {
        4
    } else if n % 2 == 0 {
        2
    } else if n % 3 == 0 {
        3
    } else if n % 5 == 0 {
        5
    } else {
        let mut p = 7;
        while p * p <= n {
            if n % p == 0 {
                return p;
            }
            p += 2;
        }
        n
    }
}
