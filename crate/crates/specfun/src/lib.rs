//! Modified Bessel functions of integer order, Kelvin functions, and a small
//! adaptive quadrature routine.
//!
//! These are reference implementations used as *independent oracles* by the
//! numerical test suites of this workspace: closed-form solutions of the
//! radial model problems are built from `K_m`, `I_m` and `ker/kei`, and the
//! discretizations are checked against them. Accuracy is near machine
//! precision (series for small argument, a Steed continued fraction for
//! large argument), verified against 25-digit values in the unit tests.

use num_complex::Complex64;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// I_0 by power series (all terms positive, no cancellation).
pub fn bessel_i0(x: f64) -> f64 {
    let q = x * x / 4.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        term *= q / ((k * k) as f64);
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
    }
    sum
}

/// I_1 by power series.
pub fn bessel_i1(x: f64) -> f64 {
    let q = x * x / 4.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        term *= q / ((k * (k + 1)) as f64);
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
    }
    sum * x / 2.0
}

fn i0_c(z: Complex64) -> Complex64 {
    let q = z * z / 4.0;
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for k in 1..300 {
        term *= q / ((k * k) as f64);
        sum += term;
        if term.norm() < sum.norm() * 1e-17 {
            break;
        }
    }
    sum
}

fn i1_c(z: Complex64) -> Complex64 {
    let q = z * z / 4.0;
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for k in 1..300 {
        term *= q / ((k * (k + 1)) as f64);
        sum += term;
        if term.norm() < sum.norm() * 1e-17 {
            break;
        }
    }
    sum * z / 2.0
}

/// K_0 and K_1 together, for complex argument with Re z > 0.
///
/// |z| <= 2: classical series for K_0, then the Wronskian
/// I_0 K_1 + I_1 K_0 = 1/z for K_1. |z| > 2: Steed's continued fraction.
fn k0k1_c(z: Complex64) -> (Complex64, Complex64) {
    if z.norm() <= 2.0 {
        let q = z * z / 4.0;
        let mut term = Complex64::new(1.0, 0.0);
        let mut h = 0.0;
        let mut sum = Complex64::new(0.0, 0.0);
        for k in 1..300 {
            term *= q / ((k * k) as f64);
            h += 1.0 / k as f64;
            sum += term * h;
            if term.norm() * h < 1e-18 * (1.0 + sum.norm()) {
                break;
            }
        }
        let i0 = i0_c(z);
        let k0 = -((z / 2.0).ln() + EULER_GAMMA) * i0 + sum;
        let k1 = (1.0 / z - i1_c(z) * k0) / i0;
        (k0, k1)
    } else {
        // Steed CF2 at nu = 0 (converges for |arg z| < pi/2).
        let a1 = 0.25;
        let mut b = 2.0 * (1.0 + z);
        let mut d = 1.0 / b;
        let mut delh = d;
        let mut h = d;
        let mut q1 = Complex64::new(0.0, 0.0);
        let mut q2 = Complex64::new(1.0, 0.0);
        let mut q = Complex64::new(a1, 0.0);
        let mut c = Complex64::new(a1, 0.0);
        let mut a = -a1;
        let mut s = 1.0 + q * delh;
        for i in 2..10_000 {
            a -= 2.0 * (i - 1) as f64;
            c = -a * c / i as f64;
            let qnew = (q1 - b * q2) / a;
            q1 = q2;
            q2 = qnew;
            q += c * qnew;
            b += 2.0;
            d = 1.0 / (a * d + b);
            delh = (b * d - 1.0) * delh;
            h += delh;
            let dels = q * delh;
            s += dels;
            if dels.norm() < s.norm() * 1e-16 {
                break;
            }
        }
        let h = a1 * h;
        let k0 = (std::f64::consts::PI / (2.0 * z)).sqrt() * (-z).exp() / s;
        let k1 = k0 * (z + 0.5 - h) / z;
        (k0, k1)
    }
}

pub fn bessel_k0(x: f64) -> f64 {
    k0k1_c(Complex64::new(x, 0.0)).0.re
}

pub fn bessel_k1(x: f64) -> f64 {
    k0k1_c(Complex64::new(x, 0.0)).1.re
}

/// Ratios K_{m+1}(x)/K_m(x) for m = 0..=mmax, by the (stable) upward
/// recurrence K_{m+1} = K_{m-1} + (2m/x) K_m.
fn k_ratios(mmax: usize, x: f64) -> Vec<f64> {
    let mut rho = Vec::with_capacity(mmax + 1);
    rho.push(bessel_k1(x) / bessel_k0(x));
    for m in 1..=mmax {
        let prev = rho[m - 1];
        rho.push(2.0 * m as f64 / x + 1.0 / prev);
    }
    rho
}

/// ln K_m(x); usable far beyond the overflow range of K_m itself.
pub fn ln_bessel_k(m: usize, x: f64) -> f64 {
    let mut ln = bessel_k0(x).ln();
    if m == 0 {
        return ln;
    }
    let rho = k_ratios(m - 1, x);
    for r in &rho {
        ln += r.ln();
    }
    ln
}

/// K_m(x) for integer order. Overflows for large m at small x; use
/// [`ln_bessel_k`] there.
pub fn bessel_k(m: usize, x: f64) -> f64 {
    match m {
        0 => bessel_k0(x),
        1 => bessel_k1(x),
        _ => ln_bessel_k(m, x).exp(),
    }
}

/// K_m'(x)/K_m(x), the logarithmic derivative (always negative).
pub fn bessel_kp_over_k(m: usize, x: f64) -> f64 {
    if m == 0 {
        return -bessel_k1(x) / bessel_k0(x);
    }
    let rho = k_ratios(m, x);
    -(1.0 / rho[m - 1] + rho[m]) / 2.0
}

/// K_m(x2)/K_m(x1).
pub fn bessel_k_ratio(m: usize, x1: f64, x2: f64) -> f64 {
    (ln_bessel_k(m, x2) - ln_bessel_k(m, x1)).exp()
}

fn kelvin_k0(x: f64) -> (Complex64, Complex64) {
    let z = Complex64::from_polar(x, std::f64::consts::FRAC_PI_4);
    k0k1_c(z)
}

/// Kelvin function ker(x): real part of K_0(x e^{i pi/4}).
pub fn kelvin_ker(x: f64) -> f64 {
    kelvin_k0(x).0.re
}

/// Kelvin function kei(x).
pub fn kelvin_kei(x: f64) -> f64 {
    kelvin_k0(x).0.im
}

/// d/dx ker(x). Uses (ker + i kei)' = -e^{i pi/4} K_1(x e^{i pi/4}).
pub fn kelvin_kerp(x: f64) -> f64 {
    let k1 = kelvin_k0(x).1;
    (-Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4) * k1).re
}

/// d/dx kei(x).
pub fn kelvin_keip(x: f64) -> f64 {
    let k1 = kelvin_k0(x).1;
    (-Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4) * k1).im
}

/// Adaptive Simpson quadrature.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
    }
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (left, lm, flm) = simpson(f, a, fa, m, fm);
        let (right, rm, frm) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, fa, m, fm, left, lm, flm, tol / 2.0, depth - 1)
                + recurse(f, m, fm, b, fb, right, rm, frm, tol / 2.0, depth - 1)
        }
    }
    let fa = f(a);
    let fb = f(b);
    let (whole, m, fm) = simpson(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, whole, m, fm, tol, 40)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(got: f64, want: f64, rel: f64) {
        let scale = want.abs().max(1e-300);
        assert!(
            (got - want).abs() <= rel * scale,
            "got {got:.16e}, want {want:.16e} (rel err {:.2e})",
            (got - want).abs() / scale
        );
    }

    // Reference values computed with 25-digit arithmetic.
    #[test]
    fn k0_k1_small_and_large_argument() {
        close(bessel_k0(0.5), 0.924_419_071_227_665_9, 1e-14);
        close(bessel_k1(0.5), 1.656_441_120_003_300_9, 1e-14);
        close(bessel_k0(1.0), 0.421_024_438_240_708_33, 1e-14);
        close(bessel_k1(1.0), 0.601_907_230_197_234_57, 1e-14);
        close(bessel_k0(2.0), 0.113_893_872_749_533_44, 1e-13);
        close(bessel_k1(2.0), 0.139_865_881_816_522_43, 1e-13);
        close(bessel_k0(10.0), 1.778_006_231_616_765_2e-5, 1e-13);
        close(bessel_k1(10.0), 1.864_877_345_382_558_5e-5, 1e-13);
        close(bessel_k0(25.0), 3.464_161_562_213_114_4e-12, 1e-13);
    }

    #[test]
    fn branch_seam_is_continuous() {
        let below = bessel_k0(2.0 - 1e-9);
        let above = bessel_k0(2.0 + 1e-9);
        close(below, above, 1e-8);
    }

    #[test]
    fn integer_order_recurrence() {
        close(bessel_k(2, 1.5), 0.583_655_963_256_650_8, 1e-13);
        close(bessel_k(5, 1.0), 360.960_589_601_240_7, 1e-13);
        close(bessel_k(5, 3.0), 0.937_773_602_386_808, 1e-13);
        close(bessel_k(10, 1.0), 1.807_132_899_010_294_5e8, 1e-12);
        close(bessel_k(20, 5.0), 4.827_000_520_621_484_7e8, 1e-12);
        close(bessel_k(3, 7.5), 4.359_233_032_219_250_4e-4, 1e-13);
    }

    #[test]
    fn log_scaled_large_order() {
        close(ln_bessel_k(64, 1.0), 244.673_620_647_571_07, 1e-13);
        close(ln_bessel_k(64, 2.0), 200.300_298_234_020_02, 1e-13);
        close(ln_bessel_k(128, 1.0), 579.581_171_665_850_74, 1e-13);
        close(ln_bessel_k(128, 2.0), 490.852_427_273_001_6, 1e-13);
        close(
            bessel_k_ratio(64, 1.0, 2.0),
            5.356_867_841_392_335_5e-20,
            1e-12,
        );
        close(
            bessel_k_ratio(16, 1.0, 2.0),
            1.451_675_386_099_265_7e-5,
            1e-12,
        );
        close(bessel_k_ratio(1, 1.0, 2.0), 0.232_371_160_869_243_59, 1e-13);
    }

    #[test]
    fn logarithmic_derivative() {
        // K_0' = -K_1.
        close(
            bessel_kp_over_k(0, 1.0),
            -1.429_625_398_260_401_8,
            1e-14,
        );
        // Large order: K_m'(1)/K_m(1) -> -m.
        let v = bessel_kp_over_k(128, 1.0);
        assert!((v / -128.0 - 1.0).abs() < 1e-2, "got {v}");
    }

    #[test]
    fn i_series() {
        close(bessel_i0(0.5), 1.063_483_370_741_323_5, 1e-14);
        close(bessel_i0(1.0), 1.266_065_877_752_008_3, 1e-14);
        close(bessel_i0(10.0), 2_815.716_628_466_254_5, 1e-13);
        close(bessel_i1(0.3), 0.151_693_840_003_592_77, 1e-14);
        close(bessel_i1(2.5), 2.516_716_245_288_698_4, 1e-14);
    }

    #[test]
    fn kelvin_values() {
        close(kelvin_ker(1.0), 0.286_706_208_728_316_05, 1e-13);
        close(kelvin_kei(1.0), -0.494_994_636_518_719_9, 1e-13);
        close(kelvin_kerp(1.0), -0.694_603_891_100_690_5, 1e-13);
        close(kelvin_keip(1.0), 0.352_369_913_336_170_53, 1e-13);
        close(kelvin_ker(2.5), -0.069_687_972_589_045_34, 1e-12);
        close(kelvin_kei(2.5), -0.110_696_099_155_674_85, 1e-12);
        close(kelvin_ker(5.0), -0.011_511_727_199_490_662, 1e-12);
        close(kelvin_kei(5.0), 0.011_187_586_509_869_64, 1e-12);
        close(kelvin_ker(8.0), 1.485_834_068_518_962_5e-3, 1e-11);
        close(kelvin_kei(8.0), 3.695_839_561_259_596e-4, 1e-11);
        close(kelvin_ker(12.0), -6.307_713_705_205_456e-5, 1e-11);
        close(kelvin_kei(12.0), -3.899_959_497_178_822e-5, 1e-11);
        close(kelvin_ker(18.0), 7.438_083_958_045_627e-7, 1e-10);
        close(kelvin_kei(18.0), -4.555_469_696_791_095e-7, 1e-10);
    }

    #[test]
    fn quadrature() {
        let v = adaptive_simpson(&|x: f64| x * x, 0.0, 1.0, 1e-12);
        close(v, 1.0 / 3.0, 1e-12);
        // Norm of the normalized exterior null solution; closed form
        // (K_1(1)^2/K_0(1)^2 - 1)/2.
        let k01 = bessel_k0(1.0);
        let f = |r: f64| {
            let v = bessel_k0(r) / k01;
            v * v * r
        };
        let v = adaptive_simpson(&f, 1.0, 40.0, 1e-12);
        close(v, 0.521_914_389_675_606_2, 1e-10);
    }
}
