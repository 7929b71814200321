use crate::error::{Error, Result};
use crate::gf2::BinaryMatrix;

use super::LinearCode;

/// GF(2^m) built from a primitive polynomial, with `α = x` as generator.
#[derive(Clone, Debug)]
pub struct GaloisField {
    m: u32,
    field_poly: u64,
    exp: Vec<u32>,
    log: Vec<u32>,
}

fn degree(p: u64) -> Option<u32> {
    (p != 0).then(|| 63 - p.leading_zeros())
}

impl GaloisField {
    pub fn new(m: u32, field_poly: u64) -> Result<Self> {
        if !(1..=16).contains(&m) || degree(field_poly) != Some(m) {
            return Err(Error::NotPrimitive { poly: field_poly, m });
        }
        let order = (1u32 << m) - 1;
        let mut exp = Vec::with_capacity(order as usize);
        let mut log = vec![u32::MAX; 1 << m];
        let mut a = 1u64;
        for i in 0..order {
            if log[a as usize] != u32::MAX {
                // x has order below 2^m - 1.
                return Err(Error::NotPrimitive { poly: field_poly, m });
            }
            log[a as usize] = i;
            exp.push(a as u32);
            a <<= 1;
            if a >> m & 1 == 1 {
                a ^= field_poly;
            }
        }
        if a != 1 {
            return Err(Error::NotPrimitive { poly: field_poly, m });
        }
        Ok(GaloisField {
            m,
            field_poly,
            exp,
            log,
        })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn field_poly(&self) -> u64 {
        self.field_poly
    }

    pub fn order(&self) -> u32 {
        (1 << self.m) - 1
    }

    pub fn alpha_pow(&self, i: u64) -> u32 {
        self.exp[(i % u64::from(self.order())) as usize]
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let s = self.log[a as usize] + self.log[b as usize];
        self.exp[(s % self.order()) as usize]
    }

    /// Minimal polynomial of `α^i` over GF(2), as a bit mask.
    pub fn minimal_polynomial(&self, i: u64) -> u64 {
        let order = u64::from(self.order());
        // Conjugacy class {i, 2i, 4i, ...} mod 2^m - 1.
        let mut class = vec![i % order];
        loop {
            let next = class.last().unwrap() * 2 % order;
            if next == class[0] {
                break;
            }
            class.push(next);
        }
        // Product of (x + α^c), coefficients in GF(2^m).
        let mut poly: Vec<u32> = vec![1];
        for &c in &class {
            let root = self.alpha_pow(c);
            let mut next = vec![0u32; poly.len() + 1];
            for (d, &coef) in poly.iter().enumerate() {
                next[d + 1] ^= coef;
                next[d] ^= self.mul(coef, root);
            }
            poly = next;
        }
        poly.iter().enumerate().fold(0u64, |acc, (d, &c)| {
            debug_assert!(c <= 1, "minimal polynomial has binary coefficients");
            acc | (u64::from(c) << d)
        })
    }
}

fn poly_mul(a: u64, b: u64) -> u64 {
    let mut out = 0u64;
    let mut b = b;
    let mut shift = 0;
    while b != 0 {
        if b & 1 == 1 {
            out ^= a << shift;
        }
        b >>= 1;
        shift += 1;
    }
    out
}

/// Generator polynomial of the narrow-sense binary BCH code correcting `t`
/// errors: the product of the distinct minimal polynomials of α, α³, …, α^(2t−1).
pub fn bch_generator_poly(field: &GaloisField, t: u32) -> u64 {
    let order = u64::from(field.order());
    let mut used = Vec::new();
    let mut g = 1u64;
    for i in (1..2 * u64::from(t)).step_by(2) {
        let mp = field.minimal_polynomial(i);
        let rep = {
            let mut c = i % order;
            let mut min = c;
            loop {
                c = c * 2 % order;
                if c == i % order {
                    break;
                }
                min = min.min(c);
            }
            min
        };
        if !used.contains(&rep) {
            used.push(rep);
            g = poly_mul(g, mp);
        }
    }
    g
}

/// Remainder of `x^e` modulo `g` for e = 0..count, by repeated shifting.
fn monomial_remainders(g: u64, count: usize) -> Vec<u64> {
    let r = degree(g).expect("nonzero generator");
    let mut out = Vec::with_capacity(count);
    let mut rem = 1u64;
    for _ in 0..count {
        // Reduce the current monomial once it reaches degree r.
        if rem >> r & 1 == 1 {
            rem ^= g;
        }
        out.push(rem);
        rem <<= 1;
    }
    out
}

/// Builds the binary cyclic code of length `2^m − 1` generated by `gen_poly`.
///
/// Bit `j` of a codeword is the coefficient of `x^(n−1−j)`. The generator is
/// systematic, `[I_k | P]`, where row `i` carries `x^(n−1−i) mod g` in its
/// tail, and the parity matrix is `[Pᵀ | I_(n−k)]`.
pub fn bch_build(m: u32, field_poly: u64, gen_poly: u64) -> Result<LinearCode> {
    let field = GaloisField::new(m, field_poly)?;
    let n = field.order() as usize;
    let r = match degree(gen_poly) {
        Some(r) if (1..64).contains(&r) && (r as usize) < n && gen_poly & 1 == 1 => r as usize,
        _ => {
            return Err(Error::InvalidCode(format!(
                "generator polynomial {gen_poly:#x} must have a constant term and degree in 1..{}",
                n.min(64)
            )))
        }
    };
    let rems = monomial_remainders(gen_poly, n + 1);
    // x^n + 1 ≡ 0 (mod g) iff rem(x^n) = 1.
    if rems[n] != 1 {
        return Err(Error::NotCyclic { poly: gen_poly, n });
    }
    let k = n - r;
    let parity_bit = |row: usize, j: usize| -> bool {
        // Tail position j (k <= j < n) holds the coefficient of x^(n-1-j).
        let rem = rems[n - 1 - row];
        rem >> (n - 1 - j) & 1 == 1
    };
    let generator = BinaryMatrix::from_fn(k, n, |i, j| {
        if j < k {
            i == j
        } else {
            parity_bit(i, j)
        }
    })?;
    let parity = BinaryMatrix::from_fn(r, n, |i, j| {
        if j < k {
            parity_bit(j, k + i)
        } else {
            j - k == i
        }
    })?;
    let t_label = {
        // Designed error-correction capability, if this is a narrow-sense BCH code.
        (1..=r as u32)
            .find(|&t| bch_generator_poly(&field, t) == gen_poly)
            .map(|t| format!(",{t}"))
            .unwrap_or_default()
    };
    LinearCode::new(format!("BCH({n},{k}{t_label})"), generator, parity)
}
