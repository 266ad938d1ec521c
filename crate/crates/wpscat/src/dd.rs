//! Minimal double-double arithmetic. Only what the Maclaurin branches of
//! `special_fn` need: add, mul, scale by f64, complex product.

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    pub fn from(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }

    pub fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    pub fn sub(self, o: Dd) -> Dd {
        self.add(o.neg())
    }

    pub fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    pub fn mul_f64(self, b: f64) -> Dd {
        let (p, e) = two_prod(self.hi, b);
        let (hi, lo) = quick_two_sum(p, e + self.lo * b);
        Dd { hi, lo }
    }

    pub fn div_f64(self, b: f64) -> Dd {
        let q1 = self.hi / b;
        let r = self.sub(Dd::from(b).mul_f64(q1));
        let q2 = r.hi / b;
        let r = r.sub(Dd::from(b).mul_f64(q2));
        let q3 = r.hi / b;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }.add(Dd::from(q3))
    }

    pub fn sqrt(self) -> Dd {
        let s = self.hi.sqrt();
        let r = self.sub(Dd::from(s).mul_f64(s));
        Dd::from(s).add(Dd::from(r.hi / (2.0 * s)))
    }
}

/// 1/sqrt(pi) in double-double.
pub(crate) fn inv_sqrt_pi() -> Dd {
    let pi = Dd { hi: std::f64::consts::PI, lo: 1.224_646_799_147_353_2e-16 };
    let s = pi.sqrt();
    // one Newton step on 1/s
    let y = Dd::from(1.0 / s.to_f64());
    let e = Dd::from(1.0).sub(s.mul(y));
    y.add(y.mul(e))
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct CDd {
    pub re: Dd,
    pub im: Dd,
}

impl CDd {
    pub fn new(re: Dd, im: Dd) -> CDd {
        CDd { re, im }
    }

    pub fn add(self, o: CDd) -> CDd {
        CDd::new(self.re.add(o.re), self.im.add(o.im))
    }

    pub fn mul(self, o: CDd) -> CDd {
        CDd::new(
            self.re.mul(o.re).sub(self.im.mul(o.im)),
            self.re.mul(o.im).add(self.im.mul(o.re)),
        )
    }

    pub fn scale(self, s: Dd) -> CDd {
        CDd::new(self.re.mul(s), self.im.mul(s))
    }

    pub fn norm_hi(self) -> f64 {
        self.re.hi.hypot(self.im.hi)
    }
}
