//! Heilbronn matrices for Hecke operators on Manin symbols.

/// Cremona's Heilbronn matrices of determinant p, stored as [a, b, c, d];
/// they act on a symbol (u : v) by (u : v) -> (ua + vc : ub + vd).
pub fn heilbronn_cremona(p: u64) -> Vec<[i64; 4]> {
    if p == 2 {
        return vec![[1, 0, 0, 2], [2, 0, 0, 1], [2, 1, 0, 1], [1, 0, 1, 2]];
    }
    let p = p as i64;
    let mut out = vec![[1, 0, 0, p]];
    for r in -(p / 2)..=(p / 2) {
        let (mut x1, mut x2, mut y1, mut y2) = (p, -r, 0i64, 1i64);
        let (mut a, mut b) = (-p, r);
        out.push([x1, x2, y1, y2]);
        while b != 0 {
            let q = round_half_away(a, b);
            let c = a - b * q;
            a = -b;
            b = c;
            let x3 = q * x2 - x1;
            x1 = x2;
            x2 = x3;
            let y3 = q * y2 - y1;
            y1 = y2;
            y2 = y3;
            out.push([x1, x2, y1, y2]);
        }
    }
    out
}

/// a / b rounded to the nearest integer, halves away from zero.
fn round_half_away(a: i64, b: i64) -> i64 {
    let (n, d) = if b < 0 { (-a, -b) } else { (a, b) };
    if n >= 0 {
        (2 * n + d) / (2 * d)
    } else {
        -((-2 * n + d) / (2 * d))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinants() {
        for p in [2u64, 3, 5, 7, 11, 13, 97] {
            for m in heilbronn_cremona(p) {
                assert_eq!(m[0] * m[3] - m[1] * m[2], p as i64, "p = {p}, {m:?}");
            }
        }
        assert_eq!(round_half_away(5, 2), 3);
        assert_eq!(round_half_away(-5, 2), -3);
        assert_eq!(round_half_away(7, -3), -2);
    }
}
