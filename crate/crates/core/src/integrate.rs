//! Classical fourth-order Runge-Kutta stepping for fixed-step simulation.

/// A state that can be advanced along a rate of the same shape.
pub trait OdeState: Sized {
    /// Returns `self + h * rate`.
    fn scaled_add(&self, h: f64, rate: &Self) -> Self;
}

impl OdeState for f64 {
    fn scaled_add(&self, h: f64, rate: &Self) -> Self {
        self + h * rate
    }
}

impl<const N: usize> OdeState for [f64; N] {
    fn scaled_add(&self, h: f64, rate: &Self) -> Self {
        let mut out = *self;
        for (o, d) in out.iter_mut().zip(rate) {
            *o += h * d;
        }
        out
    }
}

/// One classical RK4 step of `x' = f(x)` with step `dt`.
pub fn rk4<S, F>(x: &S, dt: f64, mut f: F) -> S
where
    S: OdeState,
    F: FnMut(&S) -> S,
{
    let half = 0.5 * dt;
    let k1 = f(x);
    let k2 = f(&x.scaled_add(half, &k1));
    let k3 = f(&x.scaled_add(half, &k2));
    let k4 = f(&x.scaled_add(dt, &k3));
    x.scaled_add(dt / 6.0, &k1)
        .scaled_add(dt / 3.0, &k2)
        .scaled_add(dt / 3.0, &k3)
        .scaled_add(dt / 6.0, &k4)
}
