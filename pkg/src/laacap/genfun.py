"""Generalized PGF engine.

Transforms here are sums of real-exponent powers of z composed through the
backoff and slot structure, so they are represented as evaluable closures,
not coefficient arrays. First derivatives are propagated exactly through a
value-derivative pair (forward-mode differentiation); finite differences are
kept for tests only.

Conventions: durations are microseconds, so relevant arguments are z = e^x
with x = theta * C and C in bits per microsecond; far from a root the large
duration exponents can overflow, which is handled by saturating to +inf so
that bracketing root finders still see a correct sign.
"""

import math

_EXP_MAX = 709.0        # exp overflows just above this
_SERIES_H = 1e-5        # switch the geometric sum to a series below this
_SERIES_TERMS = 12


class GenFunDomainError(ValueError):
    """Raised when a transform is evaluated outside its convergence region."""

    def __init__(self, z, detail=""):
        self.z = z
        super().__init__(
            f"transform diverges at z={z!r}" + (f" ({detail})" if detail else ""))


class Dual:
    """Value plus first derivative, for forward-mode propagation."""

    __slots__ = ("val", "der")

    def __init__(self, val, der=0.0):
        self.val = val
        self.der = der

    def __repr__(self):
        return f"Dual({self.val!r}, {self.der!r})"

    def __add__(self, o):
        if isinstance(o, Dual):
            return Dual(self.val + o.val, self.der + o.der)
        return Dual(self.val + o, self.der)

    __radd__ = __add__

    def __sub__(self, o):
        if isinstance(o, Dual):
            return Dual(self.val - o.val, self.der - o.der)
        return Dual(self.val - o, self.der)

    def __rsub__(self, o):
        return Dual(o - self.val, -self.der)

    def __mul__(self, o):
        if isinstance(o, Dual):
            return Dual(self.val * o.val,
                        self.der * o.val + self.val * o.der)
        return Dual(self.val * o, self.der * o)

    __rmul__ = __mul__

    def __truediv__(self, o):
        if isinstance(o, Dual):
            v = self.val / o.val
            return Dual(v, (self.der - v * o.der) / o.val)
        return Dual(self.val / o, self.der / o)

    def __rtruediv__(self, o):
        v = o / self.val
        return Dual(v, -v * self.der / self.val)

    def __neg__(self):
        return Dual(-self.val, -self.der)


def _value(x):
    return x.val if isinstance(x, Dual) else x


def _exp_f(x):
    if x > _EXP_MAX:
        return math.inf
    return math.exp(x)


def _pow_f(b, e):
    # b > 0 real power, saturating to +inf instead of raising OverflowError
    if b == 0.0:
        return 0.0 if e > 0 else math.inf
    if math.isinf(b):
        return math.inf if e > 0 else 0.0
    return _exp_f(e * math.log(b))


def gexp(x):
    """exp for float or Dual, saturating to +inf on overflow."""
    if isinstance(x, Dual):
        v = _exp_f(x.val)
        return Dual(v, v * x.der if math.isfinite(v) else math.inf)
    return _exp_f(x)


def glog(x):
    if isinstance(x, Dual):
        if x.val <= 0:
            raise ValueError("log of non-positive transform value")
        return Dual(math.log(x.val), x.der / x.val)
    if x <= 0:
        raise ValueError("log of non-positive transform value")
    return math.log(x)


def gpow(x, e):
    """x**e for float or Dual base and a real constant exponent, x >= 0."""
    if isinstance(x, Dual):
        v = _pow_f(x.val, e)
        if not math.isfinite(v):
            return Dual(v, math.inf)
        if x.val == 0.0:
            return Dual(v, 0.0)
        return Dual(v, e * v / x.val * x.der)
    return _pow_f(x, e)


def geom_sum(y, w):
    """sum_{k=0}^{w-1} y**k with a stable series branch near y = 1."""
    yv = _value(y)
    h = y - 1.0
    hv = yv - 1.0
    if abs(hv) < _SERIES_H:
        # sum = ((1+h)^w - 1)/h = C(w,1) + C(w,2) h + C(w,3) h^2 + ...
        total = 0.0
        hp = 1.0 if not isinstance(y, Dual) else Dual(1.0, 0.0)
        c = float(w)
        for m in range(1, min(w, _SERIES_TERMS) + 1):
            total = total + c * hp
            hp = hp * h
            c = c * (w - m) / (m + 1)
        return total
    if hv > 0 and (w - 1) * math.log(yv) > _EXP_MAX + 40:
        return Dual(math.inf, math.inf) if isinstance(y, Dual) else math.inf
    return (gpow(y, w) - 1.0) / h


class GenFun:
    """Evaluable transform z -> (value, d/dz value), defined for real z near
    and above 1 (below 1 wherever the expression stays finite)."""

    def __init__(self, fn, tag):
        self._fn = fn
        self.tag = tag

    def __repr__(self):
        return f"GenFun({self.tag})"

    def __call__(self, z):
        return self.value(z)

    def value(self, z):
        return self._fn(float(z))

    def value_and_derivative(self, z):
        d = self._fn(Dual(float(z), 1.0))
        return d.val, d.der

    def derivative(self, z):
        return self.value_and_derivative(z)[1]

    def mean(self):
        """First derivative at z = 1 (the mean for a normalized transform)."""
        return self.derivative(1.0)


def eta_hat(j, params):
    """Backoff-count PGF of retry stage j: uniform over {0..W_j - 1}."""
    w = params.window_laa(j)  # range check happens here
    return GenFun(lambda z: geom_sum(z, w) / w, f"eta[{j}] W={w}")


def slot_pgf_from_atoms(atoms, tag="slot"):
    """PGF of a finite (duration, probability) mixture."""
    terms = [(d, p) for d, p in atoms if p != 0.0]

    def fn(z):
        total = 0.0
        for d, p in terms:
            total = total + p * gpow(z, d)
        return total

    return GenFun(fn, tag)


def _laa_windows(params):
    return [params.window_laa(j) for j in range(params.k_retry_laa)]


def t1_hat(params, cp, slot):
    """Interval transform of a delivered packet: i collisions cost i
    collision slots and i+1 backoffs drawn through the slot PGF,
    conditioned on delivery (i < K_L)."""
    p = cp.p_laa
    if p >= 1.0:
        raise ValueError("p_laa must be < 1")
    kl = params.k_retry_laa
    tc = params.t_c_us
    ws = _laa_windows(params)
    norm = 1.0 - p ** kl
    coefs = [(1.0 - p) * p ** i / norm for i in range(kl)]
    slot_fn = slot._fn

    def fn(z):
        y = slot_fn(z)
        prod = geom_sum(y, ws[0]) / ws[0]
        total = coefs[0] * prod
        for i in range(1, kl):
            prod = prod * (geom_sum(y, ws[i]) / ws[i])
            if coefs[i] != 0.0:
                total = total + coefs[i] * gpow(z, i * tc) * prod
        return total

    return GenFun(fn, f"t1 p={p:.6g} {params.mode}")


def t2_hat(params, cp, slot):
    """Interval transform of a dropped packet: K_L collisions, K_L backoffs."""
    kl = params.k_retry_laa
    tc = params.t_c_us
    ws = _laa_windows(params)
    slot_fn = slot._fn

    def fn(z):
        y = slot_fn(z)
        prod = gpow(z, kl * tc)
        for w in ws:
            prod = prod * (geom_sum(y, w) / w)
        return prod

    return GenFun(fn, f"t2 {params.mode}")


class T3Fun(GenFun):
    """Transform of the whole OFF gap between consecutive successes, with an
    explicit denominator and a cached convergence bound."""

    def __init__(self, fn, den_fn, tag, has_pole):
        super().__init__(fn, tag)
        self._den_fn = den_fn
        self._has_pole = has_pole
        self._log_z_max = None

    def denominator(self, z):
        return self._den_fn(float(z))

    def log_z_max(self):
        """sup{x : denominator(e^x) > 0}; +inf when no pole exists."""
        if self._log_z_max is None:
            self._log_z_max = self._find_log_z_max()
        return self._log_z_max

    def _find_log_z_max(self):
        if not self._has_pole:
            return math.inf
        lo, hi = 0.0, 1e-6
        for _ in range(120):
            d = self._den_fn(math.exp(hi)) if hi < _EXP_MAX else -1.0
            if not d > 0.0:
                break
            lo, hi = hi, hi * 2.0
        else:
            return math.inf
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if mid == lo or mid == hi:
                break
            if self._den_fn(math.exp(mid)) > 0.0:
                lo = mid
            else:
                hi = mid
        return lo


def t3_hat(params, cp, slot):
    """Closed geometric-sum form of the success-gap transform."""
    p = cp.p_laa
    kl = params.k_retry_laa
    eps = params.per
    tf = params.t_f_us
    big_p = p ** kl
    t1 = t1_hat(params, cp, slot)
    t2 = t2_hat(params, cp, slot)
    t1_fn, t2_fn = t1._fn, t2._fn
    num_coef = (1.0 - eps) * (1.0 - big_p)
    err_coef = eps * (1.0 - big_p)

    def den_fn(z):
        d = 1.0
        if big_p != 0.0:
            d = d - big_p * t2_fn(z)
        if err_coef != 0.0:
            d = d - err_coef * t1_fn(z) * gpow(z, tf)
        return d

    def fn(z):
        zv = _value(z)
        g1 = t1_fn(z)
        d = 1.0
        if big_p != 0.0:
            d = d - big_p * t2_fn(z)
        if err_coef != 0.0:
            d = d - err_coef * g1 * gpow(z, tf)
        dv = _value(d)
        if not dv > 0.0:
            raise GenFunDomainError(zv, "geometric series diverges")
        return num_coef * g1 / d

    has_pole = big_p != 0.0 or err_coef != 0.0
    return T3Fun(fn, den_fn, f"t3 p={p:.6g} eps={eps:.6g} {params.mode}",
                 has_pole)


def big_f(x, t3, params):
    """F(x) = log t3(e^x) + x*T_f and its derivative
    F'(x) = t3'(e^x) e^x / t3(e^x) + T_f."""
    if x < 0:
        raise ValueError("F is defined for x >= 0")
    z = _exp_f(x)
    v, d = t3.value_and_derivative(z)
    if not (math.isfinite(v) and v > 0.0):
        raise GenFunDomainError(z, "transform not finite-positive")
    return math.log(v) + x * params.t_f_us, d * z / v + params.t_f_us


def big_f_value(x, t3, params):
    """Value-only F(x) for bracketing searches; +inf past the domain edge."""
    if x < 0:
        raise ValueError("F is defined for x >= 0")
    z = _exp_f(x)
    try:
        v = t3.value(z)
    except GenFunDomainError:
        return math.inf
    if not v > 0.0:
        return math.inf
    if math.isinf(v):
        return math.inf
    return math.log(v) + x * params.t_f_us
