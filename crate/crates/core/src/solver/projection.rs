//! Euclidean projections onto `l_q` balls `{y : ||y - center||_q <= radius}`.

use crate::hermitian::HermitianMatrix;
use crate::linalg;
use crate::measurement::NormExponent;

pub fn project_lq_ball(x: &[f64], center: &[f64], radius: f64, q: NormExponent) -> Vec<f64> {
    assert_eq!(x.len(), center.len(), "point and center must have equal length");
    let u: Vec<f64> = x.iter().zip(center).map(|(a, c)| a - c).collect();
    let p = match q {
        NormExponent::Two => project_l2(&u, radius),
        NormExponent::Inf => u.iter().map(|v| v.clamp(-radius, radius)).collect(),
        NormExponent::One => project_l1(&u, radius),
    };
    p.iter().zip(center).map(|(a, c)| a + c).collect()
}

fn project_l2(u: &[f64], radius: f64) -> Vec<f64> {
    let norm = u.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm <= radius {
        return u.to_vec();
    }
    let s = radius / norm;
    u.iter().map(|v| v * s).collect()
}

/// Sort-based projection onto the `l_1` ball.
fn project_l1(u: &[f64], radius: f64) -> Vec<f64> {
    let total: f64 = u.iter().map(|v| v.abs()).sum();
    if total <= radius {
        return u.to_vec();
    }
    if radius == 0.0 {
        return vec![0.0; u.len()];
    }
    let mut mags: Vec<f64> = u.iter().map(|v| v.abs()).collect();
    mags.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut threshold = 0.0;
    for (j, mu) in mags.iter().enumerate() {
        cumulative += mu;
        let candidate = (cumulative - radius) / (j + 1) as f64;
        if mu - candidate > 0.0 {
            threshold = candidate;
        } else {
            break;
        }
    }
    u.iter()
        .map(|v| v.signum() * (v.abs() - threshold).max(0.0))
        .collect()
}

/// Projection onto `{x : ||R x - b||_2 <= eta}` via the eigendecomposition of
/// `R^T R`: the projection is `(I + mu R^T R)^{-1} (x0 + mu R^T b)` for the
/// multiplier `mu >= 0` that puts it on the boundary.
pub(crate) struct FidelityProjector {
    basis: Vec<Vec<f64>>,
    lambda: Vec<f64>,
    /// `R^T b` in the eigenbasis.
    c: Vec<f64>,
    b_sq: f64,
    eta: f64,
    rank_cut: f64,
}

impl FidelityProjector {
    pub(crate) fn new(rows: &[Vec<f64>], b: &[f64], eta: f64, d: usize) -> Self {
        let mut gram = vec![num_complex::Complex64::new(0.0, 0.0); d * d];
        for row in rows {
            for i in 0..d {
                for j in 0..d {
                    gram[i * d + j].re += row[i] * row[j];
                }
            }
        }
        let eig = HermitianMatrix::new(d, gram).expect("gram matrix is symmetric").eig();
        let basis: Vec<Vec<f64>> = eig
            .columns()
            .into_iter()
            .map(|col| {
                let lead = *col.iter().max_by(|a, b| a.norm().total_cmp(&b.norm())).unwrap();
                let phase = lead.conj() / lead.norm();
                col.iter().map(|z| (z * phase).re).collect()
            })
            .collect();
        let lambda: Vec<f64> = eig.eigenvalues().iter().map(|l| l.max(0.0)).collect();
        let mut rtb = vec![0.0; d];
        for (row, bj) in rows.iter().zip(b) {
            for (o, r) in rtb.iter_mut().zip(row) {
                *o += bj * r;
            }
        }
        let c = basis.iter().map(|v| linalg::dot(v, &rtb)).collect();
        let top = lambda.iter().fold(0.0f64, |m, l| m.max(*l));
        Self {
            basis,
            lambda,
            c,
            b_sq: b.iter().map(|x| x * x).sum(),
            eta,
            rank_cut: 1e-12 * top.max(1.0),
        }
    }

    fn residual(&self, xt: &[f64]) -> f64 {
        let mut r = self.b_sq;
        for i in 0..xt.len() {
            r += self.lambda[i] * xt[i] * xt[i] - 2.0 * xt[i] * self.c[i];
        }
        r.max(0.0).sqrt()
    }

    fn at(&self, zt: &[f64], mu: f64) -> Vec<f64> {
        (0..zt.len())
            .map(|i| (zt[i] + mu * self.c[i]) / (1.0 + mu * self.lambda[i]))
            .collect()
    }

    fn limit(&self, zt: &[f64]) -> Vec<f64> {
        (0..zt.len())
            .map(|i| {
                if self.lambda[i] > self.rank_cut {
                    self.c[i] / self.lambda[i]
                } else {
                    zt[i]
                }
            })
            .collect()
    }

    pub(crate) fn project(&self, x: &[f64]) -> Vec<f64> {
        let zt: Vec<f64> = self.basis.iter().map(|v| linalg::dot(v, x)).collect();
        let xt = if self.residual(&zt) <= self.eta {
            zt
        } else if self.eta == 0.0 {
            self.limit(&zt)
        } else {
            let mut hi = 1.0;
            while self.residual(&self.at(&zt, hi)) > self.eta && hi < 1e15 {
                hi *= 2.0;
            }
            if self.residual(&self.at(&zt, hi)) > self.eta {
                self.limit(&zt)
            } else {
                let mut lo = 0.0;
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if self.residual(&self.at(&zt, mid)) > self.eta {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                self.at(&zt, hi)
            }
        };
        let mut out = vec![0.0; x.len()];
        for (v, a) in self.basis.iter().zip(&xt) {
            for (o, vi) in out.iter_mut().zip(v) {
                *o += a * vi;
            }
        }
        out
    }
}
