//! `EMBRYO v1` archives: one coefficient per line with an exact hexadecimal
//! mantissa, so a series survives a write/read cycle bit for bit.

use std::fmt::Write as _;

use anyhow::{anyhow, bail, ensure, Context, Result};
use daest_core::{ExtFloat, TruncatedSeries};
use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{ToPrimitive, Zero};

const HEADER: &str = "EMBRYO v1";

/// `(m, e)` with `x = m · 2^e` and `m` an odd-or-zero 53-bit integer.
fn int_parts(x: f64) -> (i64, i64) {
    if x == 0.0 {
        return (0, 0);
    }
    let bits = x.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i64;
    let frac = (bits & ((1u64 << 52) - 1)) as i64;
    let (m, e) = if exp == 0 { (frac, -1074) } else { (frac | (1 << 52), exp - 1075) };
    let m = if x < 0.0 { -m } else { m };
    (m, e)
}

/// Exact hexadecimal literal of `hi + tail`, with `hi` in `[1, 2)`.
fn mantissa_hex(hi: f64, tail: f64) -> String {
    if tail == 0.0 {
        return format_hex(&BigUint::from(int_parts(hi).0 as u64), -52);
    }
    let (mh, eh) = int_parts(hi);
    let (mt, et) = int_parts(tail);
    let e = eh.min(et);
    let total = (BigInt::from(mh) << (eh - e) as usize) + (BigInt::from(mt) << (et - e) as usize);
    let (_, mag) = total.into_parts();
    format_hex(&mag, e)
}

/// `n · 2^e` as `0x1.<hex>p<exp>`.
fn format_hex(n: &BigUint, e: i64) -> String {
    let bits = n.bits() as i64;
    let frac_bits = bits - 1;
    let mut frac = n - (BigUint::from(1u8) << frac_bits as usize);
    // pad the fraction to whole hex digits
    let pad = (4 - frac_bits % 4) % 4;
    frac <<= pad as usize;
    let digits = ((frac_bits + pad) / 4) as usize;
    let mut hex = if digits == 0 { String::new() } else { format!("{frac:0digits$x}") };
    while hex.ends_with('0') {
        hex.pop();
    }
    let exp = e + frac_bits;
    if hex.is_empty() {
        format!("0x1p{exp:+}")
    } else {
        format!("0x1.{hex}p{exp:+}")
    }
}

/// Parse `0x<int>[.<frac>]p<exp>` exactly.
fn parse_hex(s: &str) -> Result<(BigUint, i64)> {
    let body = s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")).ok_or_else(|| anyhow!("expected 0x prefix in `{s}`"))?;
    let (digits, exp) = body.split_once(['p', 'P']).ok_or_else(|| anyhow!("missing binary exponent in `{s}`"))?;
    let exp: i64 = exp.parse().with_context(|| format!("bad exponent in `{s}`"))?;
    let (int, frac) = digits.split_once('.').unwrap_or((digits, ""));
    ensure!(!int.is_empty() || !frac.is_empty(), "empty mantissa in `{s}`");
    let all = format!("{int}{frac}");
    let n = if all.is_empty() {
        BigUint::zero()
    } else {
        BigUint::parse_bytes(all.as_bytes(), 16).ok_or_else(|| anyhow!("bad hex digits in `{s}`"))?
    };
    Ok((n, exp - 4 * frac.len() as i64))
}

fn ldexp(mut x: f64, mut k: i64) -> f64 {
    while k < -1000 {
        x *= 2f64.powi(-1000);
        k += 1000;
    }
    while k > 1000 {
        x *= 2f64.powi(1000);
        k -= 1000;
    }
    x * 2f64.powi(k as i32)
}

/// Split `n · 2^e` (a positive value near `[1, 2)`) into `hi = fl(value)`
/// and the exact remainder.
fn to_pair(n: &BigUint, e: i64) -> Result<(f64, f64)> {
    ensure!(!n.is_zero(), "zero mantissa with nonzero sign");
    let bits = n.bits() as i64;
    let (hi_int, hi_exp) = if bits <= 53 {
        (n.clone(), e)
    } else {
        let drop = (bits - 53) as usize;
        let mut q: BigUint = n >> drop;
        let rem = n - (&q << drop);
        let half = BigUint::from(1u8) << (drop - 1);
        if rem > half || (rem == half && (&q % 2u8) == BigUint::from(1u8)) {
            q += 1u8;
        }
        (q, e + drop as i64)
    };
    let hi = ldexp(hi_int.to_f64().unwrap(), hi_exp);
    let hi_big = BigInt::from(hi_int) << (hi_exp - e).max(0) as usize;
    let diff = BigInt::from_biguint(Sign::Plus, n.clone()) - hi_big;
    let (sign, mag) = diff.into_parts();
    let tail = if mag.is_zero() {
        0.0
    } else {
        let tz = mag.trailing_zeros().unwrap_or(0) as i64;
        ensure!(mag.bits() as i64 - tz <= 53, "mantissa carries more than two doubles of precision");
        let t = ldexp(mag.to_f64().unwrap(), e);
        if sign == Sign::Minus {
            -t
        } else {
            t
        }
    };
    Ok((hi, tail))
}

pub fn write_embryo(v: &TruncatedSeries) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{HEADER}");
    let _ = writeln!(out, "dim {}", v.dim());
    let _ = writeln!(out, "degree {}", v.max_degree());
    let center: Vec<String> = v.center().iter().map(|c| format!("{c:?}")).collect();
    let _ = writeln!(out, "center {}", center.join(" "));
    for (e, c) in v.terms() {
        for k in &e {
            let _ = write!(out, "{k} ");
        }
        let _ = writeln!(out, "{} {} {}", c.sign(), mantissa_hex(c.mantissa(), c.mantissa_tail()), c.exponent());
    }
    out
}

fn field<'a>(lines: &mut impl Iterator<Item = (usize, &'a str)>, key: &str) -> Result<(usize, &'a str)> {
    let (n, line) = lines.next().ok_or_else(|| anyhow!("missing `{key}` line"))?;
    let rest = line
        .strip_prefix(key)
        .filter(|r| r.is_empty() || r.starts_with(' '))
        .ok_or_else(|| anyhow!("line {n}: expected `{key}`"))?;
    Ok((n, rest.trim()))
}

pub fn read_embryo(text: &str) -> Result<TruncatedSeries> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    match lines.next() {
        Some((_, HEADER)) => {}
        _ => bail!("not an embryo archive (expected `{HEADER}`)"),
    }
    let (n, dim) = field(&mut lines, "dim")?;
    let dim: usize = dim.parse().with_context(|| format!("line {n}: bad dimension"))?;
    ensure!(dim > 0, "line {n}: dimension must be positive");
    let (n, degree) = field(&mut lines, "degree")?;
    let degree: usize = degree.parse().with_context(|| format!("line {n}: bad degree"))?;
    let (n, center) = field(&mut lines, "center")?;
    let center: Vec<f64> = center
        .split_whitespace()
        .map(|t| t.parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .with_context(|| format!("line {n}: bad center"))?;
    ensure!(center.len() == dim, "line {n}: center has {} coordinates, expected {dim}", center.len());
    let mut terms = Vec::new();
    for (n, line) in lines {
        let toks: Vec<&str> = line.split_whitespace().collect();
        ensure!(toks.len() == dim + 3, "line {n}: expected {} fields", dim + 3);
        let exps: Vec<u32> = toks[..dim]
            .iter()
            .map(|t| t.parse::<u32>())
            .collect::<std::result::Result<_, _>>()
            .with_context(|| format!("line {n}: bad exponent"))?;
        let m: usize = exps.iter().map(|&e| e as usize).sum();
        ensure!(m <= degree, "line {n}: monomial degree {m} exceeds {degree}");
        let sign: i8 = toks[dim].parse().with_context(|| format!("line {n}: bad sign"))?;
        let exponent: i64 = toks[dim + 2].parse().with_context(|| format!("line {n}: bad exponent"))?;
        let c = if sign == 0 {
            ExtFloat::ZERO
        } else {
            let (big, e) = parse_hex(toks[dim + 1]).with_context(|| format!("line {n}"))?;
            let (hi, tail) = to_pair(&big, e).with_context(|| format!("line {n}"))?;
            // a value just below 1 rounds its leading part up to 1
            let (hi, tail, exponent) = if hi < 1.0 { (hi * 2.0, tail * 2.0, exponent - 1) } else { (hi, tail, exponent) };
            ExtFloat::from_parts_ext(sign, hi, tail, exponent)
                .ok_or_else(|| anyhow!("line {n}: mantissa outside [1, 2)"))?
        };
        terms.push((exps, c));
    }
    Ok(TruncatedSeries::from_terms(dim, center, degree, terms)?)
}
