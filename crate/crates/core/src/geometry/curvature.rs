use nalgebra::Matrix4;

use super::{hodge::levi_civita, sample_field, MetricField, MetricSample, MetricSpec, Point};
use crate::error::{Error, Result};
use crate::scalar::{HyperDual, Scalar};

type Tensor3 = [[[f64; 4]; 4]; 4];
type Tensor4 = [[[[f64; 4]; 4]; 4]; 4];

/// Antisymmetric index pairs in the order used by [`CurvatureSample::curvature_two_forms`].
pub const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// How metric derivatives are obtained.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Differentiation {
    /// Exact first and second derivatives through hyper-dual numbers.
    Dual,
    /// Second-order central differences with absolute step `h`.
    Central { h: f64 },
}

impl Differentiation {
    /// Central differences with the default step `h = 10⁻⁴ r`.
    pub fn central_at(r: f64) -> Self {
        Differentiation::Central { h: 1e-4 * r }
    }
}

/// Curvature at a point, in the oriented orthonormal frame of the metric sample.
#[derive(Clone, Debug)]
pub struct CurvatureSample {
    /// `R_abcd` with frame indices; antisymmetric in `(a, b)` and in `(c, d)`.
    pub riemann: Tensor4,
    /// `Ric_bd = Σ_a R_abad`.
    pub ricci: Matrix4<f64>,
    /// `√det g` of the coordinate chart.
    pub volume_density: f64,
    /// `max |R_abcd + R_acdb + R_adbc|`.
    pub bianchi_residual: f64,
}

impl CurvatureSample {
    /// Curvature two-forms `Ω_ab = ½ R_abcd e^c∧e^d`, indexed by [`PAIRS`] on both slots.
    pub fn curvature_two_forms(&self) -> [[f64; 6]; 6] {
        let mut out = [[0.0; 6]; 6];
        for (i, &(a, b)) in PAIRS.iter().enumerate() {
            for (j, &(c, d)) in PAIRS.iter().enumerate() {
                out[i][j] = self.riemann[a][b][c][d];
            }
        }
        out
    }

    /// `R_abcd R^abcd`.
    pub fn kretschmann(&self) -> f64 {
        let mut k = 0.0;
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        k += self.riemann[a][b][c][d].powi(2);
                    }
                }
            }
        }
        k
    }

    /// `‖Riemann‖ = √(R_abcd R^abcd)`.
    pub fn riemann_norm(&self) -> f64 {
        self.kretschmann().sqrt()
    }

    /// Frobenius norm of the Ricci tensor.
    pub fn ricci_norm(&self) -> f64 {
        self.ricci.norm()
    }

    /// Coefficient of the volume form in `tr Ω∧Ω = Ω^a_b ∧ Ω^b_a`.
    pub fn pontryagin(&self) -> f64 {
        let r = &self.riemann;
        let mut acc = 0.0;
        for a in 0..4 {
            for b in 0..4 {
                for (c, d) in PAIRS {
                    for (e, f) in PAIRS {
                        let eps = levi_civita(c, d, e, f);
                        if eps != 0.0 {
                            // each unordered pair appears twice in the full sum
                            acc += 4.0 * eps * r[a][b][c][d] * r[b][a][e][f];
                        }
                    }
                }
            }
        }
        0.25 * acc
    }

    /// Coefficient of `dx1∧dx2∧dx3∧dτ` in `tr Ω∧Ω`.
    pub fn pontryagin_density(&self) -> f64 {
        self.pontryagin() * self.volume_density
    }
}

struct MetricJet {
    g: [[f64; 4]; 4],
    dg: Tensor3,  // dg[k][i][j] = ∂_k g_ij
    ddg: Tensor4, // ddg[k][l][i][j] = ∂_k ∂_l g_ij
}

fn dual_jet<M: MetricField>(metric: &M, x: [f64; 4]) -> Result<MetricJet> {
    let mut jet = MetricJet { g: [[0.0; 4]; 4], dg: [[[0.0; 4]; 4]; 4], ddg: [[[[0.0; 4]; 4]; 4]; 4] };
    for k in 0..4 {
        for l in k..4 {
            let mut xs = x.map(HyperDual::constant);
            xs[k].e1 = 1.0;
            xs[l].e2 = 1.0;
            let g = metric.components(&xs)?;
            for i in 0..4 {
                for j in 0..4 {
                    let c = g[i][j];
                    jet.g[i][j] = c.re;
                    jet.ddg[k][l][i][j] = c.e12;
                    jet.ddg[l][k][i][j] = c.e12;
                    if k == l {
                        jet.dg[k][i][j] = c.e1;
                    }
                }
            }
        }
    }
    Ok(jet)
}

fn central_jet<M: MetricField>(metric: &M, x: [f64; 4], h: f64) -> Result<MetricJet> {
    let eval = |shift: &[(usize, f64)]| -> Result<[[f64; 4]; 4]> {
        let mut y = x;
        for &(k, s) in shift {
            y[k] += s * h;
        }
        metric.components(&y)
    };
    let g0 = eval(&[])?;
    let mut jet = MetricJet { g: g0, dg: [[[0.0; 4]; 4]; 4], ddg: [[[[0.0; 4]; 4]; 4]; 4] };
    for k in 0..4 {
        let gp = eval(&[(k, 1.0)])?;
        let gm = eval(&[(k, -1.0)])?;
        for i in 0..4 {
            for j in 0..4 {
                jet.dg[k][i][j] = (gp[i][j] - gm[i][j]) / (2.0 * h);
                jet.ddg[k][k][i][j] = (gp[i][j] - 2.0 * g0[i][j] + gm[i][j]) / (h * h);
            }
        }
        for l in (k + 1)..4 {
            let pp = eval(&[(k, 1.0), (l, 1.0)])?;
            let pm = eval(&[(k, 1.0), (l, -1.0)])?;
            let mp = eval(&[(k, -1.0), (l, 1.0)])?;
            let mm = eval(&[(k, -1.0), (l, -1.0)])?;
            for i in 0..4 {
                for j in 0..4 {
                    let v = (pp[i][j] - pm[i][j] - mp[i][j] + mm[i][j]) / (4.0 * h * h);
                    jet.ddg[k][l][i][j] = v;
                    jet.ddg[l][k][i][j] = v;
                }
            }
        }
    }
    Ok(jet)
}

/// Curvature of any closed-form metric at Cartesian coordinates `x`.
pub fn curvature_of<M: MetricField>(metric: &M, x: [f64; 4], diff: Differentiation) -> Result<CurvatureSample> {
    let jet = match diff {
        Differentiation::Dual => dual_jet(metric, x)?,
        Differentiation::Central { h } => {
            if !(h > 0.0) {
                return Err(Error::InvalidSpec(format!("differentiation step must be positive, got {h}")));
            }
            central_jet(metric, x, h)?
        }
    };
    let sample = sample_field(metric, x)?;
    Ok(assemble(&jet, &sample))
}

/// Curvature of a member of the metric family at `p`.
pub fn curvature_at(spec: &MetricSpec, p: &Point, diff: Differentiation) -> Result<CurvatureSample> {
    let r = p.require_off_nut()?;
    if let Differentiation::Central { h } = diff {
        if r <= 2.0 * h {
            return Err(Error::Domain(format!("difference stencil of step {h} at r = {r} would cross the nut")));
        }
    }
    curvature_of(spec, p.coords(), diff)
}

fn assemble(jet: &MetricJet, sample: &MetricSample) -> CurvatureSample {
    let gi = sample.inverse();
    // ∂_k g^{ij} = −g^{ia} ∂_k g_ab g^{bj}
    let mut dgi = [[[0.0; 4]; 4]; 4];
    for k in 0..4 {
        let dk = Matrix4::from_fn(|i, j| jet.dg[k][i][j]);
        let m = -(gi * dk * gi);
        for i in 0..4 {
            for j in 0..4 {
                dgi[k][i][j] = m[(i, j)];
            }
        }
    }

    // Γ_{d,bc} = ½(∂_b g_dc + ∂_c g_db − ∂_d g_bc) and its derivatives
    let mut gam_low = [[[0.0; 4]; 4]; 4];
    let mut dgam_low = [[[[0.0; 4]; 4]; 4]; 4]; // [e][d][b][c]
    for d in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                gam_low[d][b][c] = 0.5 * (jet.dg[b][d][c] + jet.dg[c][d][b] - jet.dg[d][b][c]);
                for e in 0..4 {
                    dgam_low[e][d][b][c] = 0.5 * (jet.ddg[e][b][d][c] + jet.ddg[e][c][d][b] - jet.ddg[e][d][b][c]);
                }
            }
        }
    }

    // Γ^a_bc and ∂_e Γ^a_bc
    let mut gam = [[[0.0; 4]; 4]; 4];
    let mut dgam = [[[[0.0; 4]; 4]; 4]; 4]; // [e][a][b][c]
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                let mut s = 0.0;
                for d in 0..4 {
                    s += gi[(a, d)] * gam_low[d][b][c];
                }
                gam[a][b][c] = s;
                for e in 0..4 {
                    let mut t = 0.0;
                    for d in 0..4 {
                        t += dgi[e][a][d] * gam_low[d][b][c] + gi[(a, d)] * dgam_low[e][d][b][c];
                    }
                    dgam[e][a][b][c] = t;
                }
            }
        }
    }

    // R^a_bcd = ∂_c Γ^a_db − ∂_d Γ^a_cb + Γ^a_ce Γ^e_db − Γ^a_de Γ^e_cb
    let mut up = [[[[0.0; 4]; 4]; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let mut v = dgam[c][a][d][b] - dgam[d][a][c][b];
                    for e in 0..4 {
                        v += gam[a][c][e] * gam[e][d][b] - gam[a][d][e] * gam[e][c][b];
                    }
                    up[a][b][c][d] = v;
                }
            }
        }
    }

    // lower the first index, then move all four slots to the frame
    let g = &jet.g;
    let mut low = [[[[0.0; 4]; 4]; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let mut v = 0.0;
                    for e in 0..4 {
                        v += g[a][e] * up[e][b][c][d];
                    }
                    low[a][b][c][d] = v;
                }
            }
        }
    }
    let fr = &sample.frame;
    let frame_slot = |t: &Tensor4, slot: usize| -> Tensor4 {
        let mut out = [[[[0.0; 4]; 4]; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    for l in 0..4 {
                        let mut v = 0.0;
                        for m in 0..4 {
                            let (idx, f) = match slot {
                                0 => (t[m][j][k][l], fr[(m, i)]),
                                1 => (t[i][m][k][l], fr[(m, j)]),
                                2 => (t[i][j][m][l], fr[(m, k)]),
                                _ => (t[i][j][k][m], fr[(m, l)]),
                            };
                            v += idx * f;
                        }
                        out[i][j][k][l] = v;
                    }
                }
            }
        }
        out
    };
    let mut rf = low;
    for slot in 0..4 {
        rf = frame_slot(&rf, slot);
    }

    let mut riemann = [[[[0.0; 4]; 4]; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    riemann[a][b][c][d] = 0.25 * (rf[a][b][c][d] - rf[b][a][c][d] - rf[a][b][d][c] + rf[b][a][d][c]);
                }
            }
        }
    }

    let mut bianchi: f64 = 0.0;
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let cyc = riemann[a][b][c][d] + riemann[a][c][d][b] + riemann[a][d][b][c];
                    bianchi = bianchi.max(cyc.abs());
                }
            }
        }
    }

    let ricci = Matrix4::from_fn(|b, d| (0..4).map(|a| riemann[a][b][a][d]).sum());

    CurvatureSample { riemann, ricci, volume_density: sample.volume_density(), bianchi_residual: bianchi }
}
