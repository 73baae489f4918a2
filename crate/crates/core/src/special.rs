//! Gamma, digamma and upper incomplete gamma for complex arguments.

use num_complex::Complex64;
use std::f64::consts::PI;

// B_{2k} for k = 1..8
const BERNOULLI: [f64; 8] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
];

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Digamma psi(z). Infinite at nonpositive integers.
pub fn digamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        if z.im == 0.0 && z.re == z.re.round() {
            return c(f64::INFINITY);
        }
        // psi(z) = psi(1 - z) - pi cot(pi z)
        let pz = z * PI;
        return digamma(c(1.0) - z) - PI * pz.cos() / pz.sin();
    }
    let mut z = z;
    let mut acc = c(0.0);
    while z.re < 10.0 {
        acc -= z.inv();
        z += 1.0;
    }
    let z2 = (z * z).inv();
    let mut zp = z2;
    let mut s = c(0.0);
    for (k, b) in BERNOULLI.iter().enumerate() {
        s += zp * (b / (2.0 * (k + 1) as f64));
        zp *= z2;
    }
    acc + z.ln() - z.inv() * 0.5 - s
}

pub fn digamma_real(x: f64) -> f64 {
    digamma(c(x)).re
}

/// Euler's constant, obtained as -psi(1).
pub fn euler_gamma() -> f64 {
    -digamma_real(1.0)
}

/// A branch of log Gamma(z); exp of it is Gamma(z).
pub fn ln_gamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // reflection: Gamma(z) Gamma(1 - z) = pi / sin(pi z)
        return c(PI.ln()) - (z * PI).sin().ln() - ln_gamma(c(1.0) - z);
    }
    let mut z = z;
    let mut acc = c(0.0);
    while z.re < 10.0 {
        acc -= z.ln();
        z += 1.0;
    }
    let z2 = (z * z).inv();
    let mut zp = z.inv();
    let mut s = c(0.0);
    for (k, b) in BERNOULLI.iter().enumerate() {
        let n = 2.0 * (k + 1) as f64;
        s += zp * (b / (n * (n - 1.0)));
        zp *= z2;
    }
    acc + (z - 0.5) * z.ln() - z + 0.5 * (2.0 * PI).ln() + s
}

pub fn gamma(z: Complex64) -> Complex64 {
    if z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round() {
        return c(f64::INFINITY);
    }
    ln_gamma(z).exp()
}

/// Riemann zeta at an integer k >= 2, by Euler-Maclaurin from n = 20.
pub fn zeta_int(k: u32) -> f64 {
    assert!(k >= 2, "zeta_int needs k >= 2");
    let s = k as f64;
    let n = 20.0f64;
    let mut sum: f64 = (1..20).map(|j| (j as f64).powf(-s)).sum();
    sum += n.powf(1.0 - s) / (s - 1.0) + 0.5 * n.powf(-s);
    // B_{2j}/(2j)! * s(s+1)...(s+2j-2) * n^(-s-2j+1)
    let mut rising = s;
    let mut fact = 2.0;
    for (j, b) in BERNOULLI.iter().enumerate().take(6) {
        let jj = (j + 1) as f64;
        sum += b / fact * rising * n.powf(-s - 2.0 * jj + 1.0);
        rising *= (s + 2.0 * jj - 1.0) * (s + 2.0 * jj);
        fact *= (2.0 * jj + 1.0) * (2.0 * jj + 2.0);
    }
    sum
}

/// (e^z - 1) / z without cancellation near zero.
pub fn expm1_over(z: Complex64) -> Complex64 {
    if z.norm() < 0.5 {
        let mut term = c(1.0);
        let mut sum = c(1.0);
        for k in 2..40 {
            term = term * z / k as f64;
            sum += term;
            if term.norm() < 1e-18 * sum.norm() {
                break;
            }
        }
        sum
    } else {
        (z.exp() - 1.0) / z
    }
}

// (Gamma(1 + a) - 1) / a for small |a|
fn gamma1p_minus_one_over(a: Complex64) -> Complex64 {
    // log Gamma(1 + a) / a = -gamma + sum_{k>=2} (-1)^k zeta(k) a^(k-1) / k
    let mut g_over = c(-euler_gamma());
    let mut ap = a;
    for k in 2..40u32 {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let t = ap * (sign * zeta_int(k) / k as f64);
        g_over += t;
        if t.norm() < 1e-18 {
            break;
        }
        ap *= a;
    }
    g_over * expm1_over(g_over * a)
}

/// Upper incomplete gamma Gamma(a, x) for complex a and real x > 0.
pub fn upper_gamma(a: Complex64, x: f64) -> Complex64 {
    assert!(x > 0.0, "upper_gamma needs x > 0");
    if x >= 1.5 && x >= a.re + 1.0 {
        return upper_gamma_cf(a, x);
    }
    let m = (-a.re).round();
    if m >= 0.0 && (a + m).norm() < 0.1 {
        // Gamma(b - 1, x) = (Gamma(b, x) - x^(b-1) e^-x) / (b - 1)
        let mut b = a + m;
        let mut g = upper_gamma_near_zero(b, x);
        for _ in 0..m as usize {
            b -= 1.0;
            g = (g - (b * x.ln() - x).exp()) / b;
        }
        return g;
    }
    gamma(a) - lower_gamma_series(a, x)
}

fn lower_gamma_series(a: Complex64, x: f64) -> Complex64 {
    let mut ap = a;
    let mut del = a.inv();
    let mut sum = del;
    for _ in 0..500 {
        ap += 1.0;
        del = del * x / ap;
        sum += del;
        if del.norm() < sum.norm() * 1e-17 {
            break;
        }
    }
    sum * (a * x.ln() - x).exp()
}

fn upper_gamma_near_zero(a: Complex64, x: f64) -> Complex64 {
    let lx = x.ln();
    let t1 = gamma1p_minus_one_over(a);
    let t2 = expm1_over(a * lx) * lx;
    let mut t3 = c(0.0);
    let mut p = 1.0;
    for n in 1..200 {
        p *= -x / n as f64;
        let term = (a + n as f64).inv() * p;
        t3 += term;
        if term.norm() < 1e-18 {
            break;
        }
    }
    t1 - t2 - t3 * (a * lx).exp()
}

fn upper_gamma_cf(a: Complex64, x: f64) -> Complex64 {
    const TINY: f64 = 1e-300;
    let mut b = c(x + 1.0) - a;
    let mut cc = c(1.0 / TINY);
    let mut d = b.inv();
    let mut h = d;
    for i in 1..10_000 {
        let i = i as f64;
        let an = (a - i) * i;
        b += 2.0;
        d = an * d + b;
        if d.norm() < TINY {
            d = c(TINY);
        }
        cc = b + an / cc;
        if cc.norm() < TINY {
            cc = c(TINY);
        }
        d = d.inv();
        let del = d * cc;
        h *= del;
        if (del - 1.0).norm() < 1e-16 {
            break;
        }
    }
    (a * x.ln() - x).exp() * h
}
