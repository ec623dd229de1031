use nalgebra::Matrix4;

use super::MetricSample;

/// Levi-Civita symbol on four indices.
pub fn levi_civita(i: usize, j: usize, k: usize, l: usize) -> f64 {
    let idx = [i, j, k, l];
    let mut sign = 1.0;
    for a in 0..4 {
        for b in (a + 1)..4 {
            if idx[a] == idx[b] {
                return 0.0;
            }
            if idx[a] > idx[b] {
                sign = -sign;
            }
        }
    }
    sign
}

/// Hodge star of a coordinate two-form `F_μν` (antisymmetric) with respect to
/// the sample's metric and the orientation `dx1∧dx2∧dx3∧dτ`.
pub fn hodge_star(sample: &MetricSample, two_form: &Matrix4<f64>) -> Matrix4<f64> {
    let ginv = sample.inverse();
    let vol = sample.volume_density();
    // raised F^αβ
    let up = ginv * two_form * ginv.transpose();
    let mut out = Matrix4::zeros();
    for m in 0..4 {
        for n in 0..4 {
            if m == n {
                continue;
            }
            let mut acc = 0.0;
            for a in 0..4 {
                for b in 0..4 {
                    acc += levi_civita(m, n, a, b) * up[(a, b)];
                }
            }
            out[(m, n)] = 0.5 * vol * acc;
        }
    }
    out
}

/// Pointwise norm `|F|² = ½ F_μν F^μν` of a two-form.
pub fn two_form_norm(sample: &MetricSample, two_form: &Matrix4<f64>) -> f64 {
    let ginv = sample.inverse();
    let up = ginv * two_form * ginv.transpose();
    (0.5 * two_form.component_mul(&up).sum()).max(0.0).sqrt()
}

/// Coefficient of `dx1∧dx2∧dx3∧dτ` in `F∧G` for coordinate two-forms.
pub fn wedge_density(f: &Matrix4<f64>, g: &Matrix4<f64>) -> f64 {
    let mut acc = 0.0;
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let e = levi_civita(a, b, c, d);
                    if e != 0.0 {
                        acc += e * f[(a, b)] * g[(c, d)];
                    }
                }
            }
        }
    }
    0.25 * acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{metric_at, MetricSpec, MetricVariant, Point};

    fn elementary(i: usize, j: usize) -> Matrix4<f64> {
        let mut m = Matrix4::zeros();
        m[(i, j)] = 1.0;
        m[(j, i)] = -1.0;
        m
    }

    #[test]
    fn flat_star_of_dx1_dx2() {
        let flat = MetricSample::from_matrix(Matrix4::identity()).unwrap();
        let s = hodge_star(&flat, &elementary(0, 1));
        assert!((s - elementary(2, 3)).amax() < 1e-15);
        let s = hodge_star(&flat, &elementary(0, 3));
        assert!((s - elementary(1, 2)).amax() < 1e-15);
    }

    #[test]
    fn star_is_an_involution() {
        let p = Point::from_polar(0.9, 0.7, 2.1, 0.0);
        let f = Matrix4::new(0.0, 0.3, -1.2, 0.7, -0.3, 0.0, 0.4, 2.0, 1.2, -0.4, 0.0, -0.5, -0.7, -2.0, 0.5, 0.0);
        for v in [MetricVariant::TaubNut, MetricVariant::Conformal, MetricVariant::ExactD] {
            let s = metric_at(&MetricSpec::new(v), &p).unwrap();
            let ss = hodge_star(&s, &hodge_star(&s, &f));
            assert!((ss - f).amax() < 1e-12);
        }
    }

    #[test]
    fn wedge_of_complementary_forms() {
        // dx1∧dx2 ∧ dx3∧dτ = +vol
        assert_eq!(wedge_density(&elementary(0, 1), &elementary(2, 3)), 1.0);
        assert_eq!(wedge_density(&elementary(0, 1), &elementary(0, 2)), 0.0);
    }

    #[test]
    fn levi_civita_signs() {
        assert_eq!(levi_civita(0, 1, 2, 3), 1.0);
        assert_eq!(levi_civita(1, 0, 2, 3), -1.0);
        assert_eq!(levi_civita(3, 2, 1, 0), 1.0);
        assert_eq!(levi_civita(0, 0, 2, 3), 0.0);
    }
}
