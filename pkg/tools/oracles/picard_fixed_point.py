"""Independent damped-Picard oracle for the saturation fixed point.

Brute-force iteration written separately from the library so its outputs can
be frozen as pinned regression constants before the library is built.
Run: python tools/oracles/picard_fixed_point.py
"""

import math


def mean_backoffs(w0, k, doubling):
    # e_j = (W_j + 1)/2 counts the transmission slot on top of the uniform draw
    return [((w0 * 2 ** j if doubling else w0) + 1) / 2.0 for j in range(k)]


def v_of_p(p, w0, k, doubling):
    e = mean_backoffs(w0, k, doubling)
    num = sum(p ** i for i in range(k))
    den = sum((p ** i) * e[i] for i in range(k))
    return num / den


def slot_mean(vl, vw, n, m, sigma_idle, t_cw, t_c, t_sw, t_f, t_wl):
    # six-atom slot PMF seen by a tagged LAA BS while counting down
    ol = (1.0 - vl) ** (n - 1)
    ow = (1.0 - vw) ** m
    p_idle = ol * ow
    p_cw = (1.0 - ow - (m * vw * (1.0 - vw) ** (m - 1) if m else 0.0)) * ol
    p_c = ow * (1.0 - ol - ((n - 1) * vl * (1.0 - vl) ** (n - 2) if n > 1 else 0.0))
    p_sw = (m * vw * (1.0 - vw) ** (m - 1) if m else 0.0) * ol
    p_f = ((n - 1) * vl * (1.0 - vl) ** (n - 2) if n > 1 else 0.0) * ow
    p_wl = 1.0 - (p_idle + p_cw + p_c + p_sw + p_f)
    return (p_idle * sigma_idle + p_cw * t_cw + p_c * t_c
            + p_sw * t_sw + p_f * t_f + p_wl * t_wl)


def solve(n, m, wl=16, ww=32, kl=6, kw=6, vcw=False, hl=0, hw=0,
          t_f=1000.0, sigma_idle=10.0, damp=0.5, tol=1e-14, iters=400000):
    pl, pw = 0.5, 0.5
    for _ in range(iters):
        vl = v_of_p(pl, wl, kl, vcw)
        vw = v_of_p(pw, ww, kw, True) if m else 0.0
        fac = 1.0
        if hl or hw:
            tau = slot_mean(vl, vw, n, m, sigma_idle, t_f, t_f, t_f, t_f, t_f)
            fac = (((1.0 - vl) ** hl) * ((1.0 - vw) ** hw)) ** (2.0 * t_f / tau)
        npl = 1.0 - ((1.0 - vw) ** m) * ((1.0 - vl) ** (n - 1)) * fac
        npw = 0.0 if m == 0 else 1.0 - ((1.0 - vw) ** (m - 1)) * ((1.0 - vl) ** n) * fac
        if max(abs(npl - pl), abs(npw - pw)) < tol:
            pl, pw = npl, npw
            break
        pl += damp * (npl - pl)
        pw += damp * (npw - pw)
    vl = v_of_p(pl, wl, kl, vcw)
    vw = v_of_p(pw, ww, kw, True) if m else 0.0
    fac = 1.0
    if hl or hw:
        tau = slot_mean(vl, vw, n, m, sigma_idle, t_f, t_f, t_f, t_f, t_f)
        fac = (((1.0 - vl) ** hl) * ((1.0 - vw) ** hw)) ** (2.0 * t_f / tau)
    res = max(
        abs(pl - (1.0 - ((1.0 - vw) ** m) * ((1.0 - vl) ** (n - 1)) * fac)),
        abs(pw - (0.0 if m == 0 else
                  1.0 - ((1.0 - vw) ** (m - 1)) * ((1.0 - vl) ** n) * fac)),
    )
    return vl, vw, pl, pw, res


def report(tag, *args, **kw):
    vl, vw, pl, pw, res = solve(*args, **kw)
    print(f"{tag}:")
    print(f"    v_laa={vl!r}, v_wifi={vw!r},")
    print(f"    p_laa={pl!r}, p_wifi={pw!r},   # residual {res:.2e}")


if __name__ == "__main__":
    report("N5_M5_FCW", 5, 5, vcw=False)
    report("N5_M5_VCW", 5, 5, vcw=True)
    report("N2_M1_FCW", 2, 1, vcw=False)
    report("N10_M10_VCW", 10, 10, vcw=True)
    report("N2_M2_H11_FCW", 2, 2, vcw=False, hl=1, hw=1)
    report("N2_M0_H10_FCW", 2, 0, vcw=False, hl=1, hw=0)
    report("N2_M0_FCW", 2, 0, vcw=False)
