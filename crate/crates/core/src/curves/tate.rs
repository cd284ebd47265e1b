//! Tate's algorithm: Kodaira type, Tamagawa number and conductor exponent.

use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::model::CurveModel;
use crate::arith::{bigint_mod, cubic_root_count, inv_mod, kronecker, valuation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Reduction {
    Good,
    SplitMultiplicative,
    NonsplitMultiplicative,
    Additive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Kodaira {
    I(u32),
    II,
    III,
    IV,
    IStar(u32),
    IVStar,
    IIIStar,
    IIStar,
}

impl Kodaira {
    pub fn components(&self) -> u32 {
        match *self {
            Kodaira::I(0) => 1,
            Kodaira::I(n) => n,
            Kodaira::II => 1,
            Kodaira::III => 2,
            Kodaira::IV => 3,
            Kodaira::IStar(n) => 5 + n,
            Kodaira::IVStar => 7,
            Kodaira::IIIStar => 8,
            Kodaira::IIStar => 9,
        }
    }
}

impl fmt::Display for Kodaira {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kodaira::I(n) => write!(f, "I{n}"),
            Kodaira::II => write!(f, "II"),
            Kodaira::III => write!(f, "III"),
            Kodaira::IV => write!(f, "IV"),
            Kodaira::IStar(n) => write!(f, "I{n}*"),
            Kodaira::IVStar => write!(f, "IV*"),
            Kodaira::IIIStar => write!(f, "III*"),
            Kodaira::IIStar => write!(f, "II*"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalData {
    pub p: u64,
    pub reduction: Reduction,
    pub kodaira: Kodaira,
    pub conductor_exponent: u32,
    pub tamagawa: u64,
    /// Valuation of the discriminant of a model minimal at p.
    pub disc_valuation: u32,
}

struct Ctx {
    p: u64,
    bp: BigInt,
}

impl Ctx {
    fn md(&self, x: &BigInt) -> u64 {
        bigint_mod(x, self.p)
    }
    fn pdiv(&self, x: &BigInt) -> bool {
        self.md(x) == 0
    }
    fn val(&self, x: &BigInt) -> u32 {
        valuation(x, self.p)
    }
    fn pk(&self, k: u32) -> BigInt {
        num_traits::pow(self.bp.clone(), k as usize)
    }
    fn div(&self, x: &BigInt, d: &BigInt) -> BigInt {
        debug_assert!((x % d).is_zero());
        x / d
    }
    fn inv(&self, x: &BigInt) -> BigInt {
        BigInt::from(inv_mod(self.md(x) as i64, self.p).expect("unit mod p"))
    }
    fn reduce(&self, x: BigInt) -> BigInt {
        BigInt::from(self.md(&x))
    }
    /// Whether a X^2 + b X + c has a root in F_p.
    fn quad_root(&self, a: &BigInt, b: &BigInt, c: &BigInt) -> bool {
        let (a, b, c) = (self.md(a), self.md(b), self.md(c));
        let p = self.p;
        if a == 0 {
            return b != 0 || c == 0;
        }
        if p == 2 {
            return (0..2).any(|x| (a * x * x + b * x + c) % 2 == 0);
        }
        let disc = (b as i128 * b as i128 - 4 * a as i128 * c as i128).rem_euclid(p as i128) as i64;
        kronecker(disc, p) >= 0
    }
}

/// Local reduction data at p of the curve given by an integral model.
pub fn local_data(model: &CurveModel, p: u64) -> LocalData {
    let ctx = Ctx { p, bp: BigInt::from(p) };
    let mut e = model.clone();
    loop {
        let inv = e.invariants();
        let vd = ctx.val(&inv.disc);
        if vd == 0 {
            return LocalData {
                p,
                reduction: Reduction::Good,
                kodaira: Kodaira::I(0),
                conductor_exponent: 0,
                tamagawa: 1,
                disc_valuation: 0,
            };
        }
        let finish = |kodaira: Kodaira, tamagawa: u64, reduction: Reduction| LocalData {
            p,
            reduction,
            kodaira,
            conductor_exponent: vd + 1 - kodaira.components(),
            tamagawa,
            disc_valuation: vd,
        };

        // Move the singular point of the reduction to (0, 0).
        let (r, t) = if p <= 3 {
            singular_point_small(&e, p)
        } else {
            let r = if ctx.pdiv(&inv.c4) {
                -&inv.b2 * ctx.inv(&BigInt::from(12))
            } else {
                -(&inv.c6 + &inv.b2 * &inv.c4) * ctx.inv(&(&inv.c4 * 12u32))
            };
            let r = ctx.reduce(r);
            let t = ctx.reduce(-(e.a1() * &r + e.a3()) * ctx.inv(&BigInt::from(2)));
            (r, t)
        };
        e = e.rst(&r, &BigInt::zero(), &t);
        let inv = e.invariants();

        if !ctx.pdiv(&inv.c4) {
            let split = if p >= 5 {
                kronecker(-(ctx.md(&inv.c6) as i64), p) == 1
            } else {
                ctx.quad_root(&BigInt::from(1), e.a1(), &-e.a2())
            };
            let (c, red) = if split {
                (vd as u64, Reduction::SplitMultiplicative)
            } else if vd % 2u32 == 0 {
                (2, Reduction::NonsplitMultiplicative)
            } else {
                (1, Reduction::NonsplitMultiplicative)
            };
            return finish(Kodaira::I(vd), c, red);
        }
        if ctx.val(e.a6()) < 2 {
            return finish(Kodaira::II, 1, Reduction::Additive);
        }
        if ctx.val(&inv.b8) < 3 {
            return finish(Kodaira::III, 2, Reduction::Additive);
        }
        if ctx.val(&inv.b6) < 3 {
            let c = if ctx.quad_root(&BigInt::from(1), &ctx.div(e.a3(), &ctx.bp), &-ctx.div(e.a6(), &ctx.pk(2))) {
                3
            } else {
                1
            };
            return finish(Kodaira::IV, c, Reduction::Additive);
        }

        // Now arrange p | a1, a2; p^2 | a3, a4; p^3 | a6.
        let (s, t) = if p == 2 {
            (ctx.reduce(e.a2().clone()), BigInt::from(2) * ctx.reduce(ctx.div(e.a6(), &ctx.pk(2))))
        } else if p == 3 {
            (e.a1().clone(), e.a3().clone())
        } else {
            let half = ctx.inv(&BigInt::from(2));
            (-e.a1() * &half, -e.a3() * &half)
        };
        e = e.rst(&BigInt::zero(), &s, &t);

        let b = ctx.div(e.a2(), &ctx.bp);
        let c = ctx.div(e.a4(), &ctx.pk(2));
        let d = ctx.div(e.a6(), &ctx.pk(3));
        let w = &d * &d * 27u32 - &b * &b * &c * &c + &b * &b * &b * &d * 4u32 - &b * &c * &d * 18u32 + &c * &c * &c * 4u32;
        let x = &c * 3u32 - &b * &b;
        let sw = if ctx.pdiv(&w) {
            if ctx.pdiv(&x) {
                3
            } else {
                2
            }
        } else {
            1
        };

        if sw == 1 {
            let roots = cubic_root_count(ctx.md(&b), ctx.md(&c), ctx.md(&d), p);
            return finish(Kodaira::IStar(0), 1 + roots as u64, Reduction::Additive);
        }
        if sw == 2 {
            let r = if p == 2 {
                c.clone()
            } else if p == 3 {
                &b * &c
            } else {
                (&b * &c - &d * 9u32) * ctx.inv(&(&x * 2u32))
            };
            let r = ctx.reduce(r) * &ctx.bp;
            e = e.rst(&r, &BigInt::zero(), &BigInt::zero());
            let (mut ix, mut iy) = (3u32, 3u32);
            let (mut mx, mut my) = (ctx.pk(2), ctx.pk(2));
            let cp;
            loop {
                let _a2t = ctx.div(e.a2(), &ctx.bp);
                let a3t = ctx.div(e.a3(), &my);
                let a6t = ctx.div(e.a6(), &(&mx * &my));
                if ctx.pdiv(&(&a3t * &a3t + &a6t * 4u32)) {
                    let t = if p == 2 {
                        &my * ctx.reduce(a6t.clone())
                    } else {
                        &my * ctx.reduce(-&a3t * ctx.inv(&BigInt::from(2)))
                    };
                    e = e.rst(&BigInt::zero(), &BigInt::zero(), &t);
                    my *= &ctx.bp;
                    iy += 1;
                    let a2t = ctx.div(e.a2(), &ctx.bp);
                    let a4t = ctx.div(e.a4(), &(&ctx.bp * &mx));
                    let a6t = ctx.div(e.a6(), &(&mx * &my));
                    if ctx.pdiv(&(&a4t * &a4t - &a6t * &a2t * 4u32)) {
                        let r = if p == 2 {
                            &mx * ctx.reduce(&a6t * &a2t)
                        } else {
                            &mx * ctx.reduce(-&a4t * ctx.inv(&(&a2t * 2u32)))
                        };
                        e = e.rst(&r, &BigInt::zero(), &BigInt::zero());
                        mx *= &ctx.bp;
                        ix += 1;
                    } else {
                        cp = if ctx.quad_root(&a2t, &a4t, &a6t) { 4 } else { 2 };
                        break;
                    }
                } else {
                    cp = if ctx.quad_root(&BigInt::from(1), &a3t, &-a6t) { 4 } else { 2 };
                    break;
                }
            }
            return finish(Kodaira::IStar(ix + iy - 5), cp, Reduction::Additive);
        }

        // Triple root.
        let r = if p == 2 {
            b.clone()
        } else if p == 3 {
            -d.clone()
        } else {
            -&b * ctx.inv(&BigInt::from(3))
        };
        let r = ctx.reduce(r) * &ctx.bp;
        e = e.rst(&r, &BigInt::zero(), &BigInt::zero());
        let a3t = ctx.div(e.a3(), &ctx.pk(2));
        let a6t = ctx.div(e.a6(), &ctx.pk(4));
        if !ctx.pdiv(&(&a3t * &a3t + &a6t * 4u32)) {
            let c = if ctx.quad_root(&BigInt::from(1), &a3t, &-&a6t) { 3 } else { 1 };
            return finish(Kodaira::IVStar, c, Reduction::Additive);
        }
        let t = if p == 2 {
            ctx.pk(2) * ctx.reduce(a6t)
        } else {
            ctx.pk(2) * ctx.reduce(-&a3t * ctx.inv(&BigInt::from(2)))
        };
        e = e.rst(&BigInt::zero(), &BigInt::zero(), &t);
        if ctx.val(e.a4()) < 4 {
            return finish(Kodaira::IIIStar, 2, Reduction::Additive);
        }
        if ctx.val(e.a6()) < 6 {
            return finish(Kodaira::IIStar, 1, Reduction::Additive);
        }
        // Not minimal at p.
        e = CurveModel::new([
            ctx.div(e.a1(), &ctx.bp),
            ctx.div(e.a2(), &ctx.pk(2)),
            ctx.div(e.a3(), &ctx.pk(3)),
            ctx.div(e.a4(), &ctx.pk(4)),
            ctx.div(e.a6(), &ctx.pk(6)),
        ]);
    }
}

fn singular_point_small(e: &CurveModel, p: u64) -> (BigInt, BigInt) {
    let a: Vec<i64> = e.a.iter().map(|x| bigint_mod(x, p) as i64).collect();
    let pi = p as i64;
    for x in 0..pi {
        for y in 0..pi {
            let f = y * y + a[0] * x * y + a[2] * y - x * x * x - a[1] * x * x - a[3] * x - a[4];
            let fx = a[0] * y - 3 * x * x - 2 * a[1] * x - a[3];
            let fy = 2 * y + a[0] * x + a[2];
            if f.rem_euclid(pi) == 0 && fx.rem_euclid(pi) == 0 && fy.rem_euclid(pi) == 0 {
                return (BigInt::from(x), BigInt::from(y));
            }
        }
    }
    unreachable!("reduction mod {p} has no singular point although p divides the discriminant")
}

pub fn conductor_from_local(data: &[LocalData]) -> u64 {
    data.iter().map(|d| d.p.pow(d.conductor_exponent)).product()
}
