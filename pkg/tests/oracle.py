"""Independent reference evaluator for the error measures.

Every measure here is computed directly from its defining equation with
plain Python loops: no numpy vectorisation, no shared helpers with the
package engine. Geometric means use explicit products, medians sort a
list. This file stays deliberately naive; it is the oracle the engine is
checked against, so it must not import the engine's internals.

Row format: list of (series_id, origin, step, actual, forecast).
Benchmark: dict (series_id, origin, step) -> benchmark forecast.
Train: dict series_id -> list of train values.
"""

import math


def _median(values):
    s = sorted(values)
    n = len(s)
    mid = n // 2
    if n % 2 == 1:
        return s[mid]
    return (s[mid - 1] + s[mid]) / 2.0


def _mean(values):
    return sum(values) / len(values)


def _gmean(values):
    prod = 1.0
    for v in values:
        prod *= v
    return prod ** (1.0 / len(values))


def _series_order(rows):
    order = []
    for sid, *_ in rows:
        if sid not in order:
            order.append(sid)
    return order


def _series_rows(rows, sid):
    return [r for r in rows if r[0] == sid]


def _errors(rows):
    return [y - f for (_, _, _, y, f) in rows]


def oracle_evaluate(name, rows, benchmark=None, train=None, weights=None, constants=None):
    """Direct-from-equation value of a measure; assumes no undefined terms."""
    consts = constants or {}
    e = _errors(rows)
    n = len(rows)
    y = [r[3] for r in rows]
    f = [r[4] for r in rows]

    if name == "ME":
        return _mean(e)
    if name in ("MSE",):
        return _mean([v * v for v in e])
    if name in ("RMSE", "ErrorStd"):
        return math.sqrt(_mean([v * v for v in e]))
    if name == "MAE":
        return _mean([abs(v) for v in e])
    if name == "MdAE":
        return _median([abs(v) for v in e])
    if name == "RMdSE":
        return math.sqrt(_median([v * v for v in e]))
    if name == "GMAE":
        return _gmean([abs(v) for v in e])
    if name == "GRMSE":
        prod = 1.0
        for v in e:
            prod *= v * v
        return prod ** (1.0 / (2 * n))

    if name in ("MAPE", "MdAPE", "RMSPE", "RMdSPE"):
        p = [100.0 * ei / yi for ei, yi in zip(e, y)]
        if name == "MAPE":
            return _mean([abs(v) for v in p])
        if name == "MdAPE":
            return _median([abs(v) for v in p])
        if name == "RMSPE":
            return math.sqrt(_mean([v * v for v in p]))
        return math.sqrt(_median([v * v for v in p]))
    if name == "sMAPE":
        return _mean([200.0 * abs(ei) / (abs(yi) + abs(fi)) for ei, yi, fi in zip(e, y, f)])
    if name == "sMdAPE":
        return _median([200.0 * abs(ei) / (abs(yi) + abs(fi)) for ei, yi, fi in zip(e, y, f)])
    if name == "msMAPE":
        eps = consts.get("epsilon", 0.1)
        thr = consts.get("threshold", 0.5)
        return _mean([
            200.0 * abs(ei) / max(abs(yi) + abs(fi) + eps, thr + eps)
            for ei, yi, fi in zip(e, y, f)
        ])
    if name == "MAAPE":
        return _mean([math.atan(abs(ei / yi)) for ei, yi in zip(e, y)])

    if name in ("WAPE", "sWAPE", "WRMSPE", "RTAE"):
        per_series = []
        for sid in _series_order(rows):
            sr = _series_rows(rows, sid)
            se = _errors(sr)
            sy = [r[3] for r in sr]
            sf = [r[4] for r in sr]
            if name == "WAPE":
                per_series.append(sum(abs(v) for v in se) / sum(abs(v) for v in sy))
            elif name == "sWAPE":
                per_series.append(
                    sum(abs(v) for v in se) / sum(abs(a) + abs(b) for a, b in zip(sy, sf))
                )
            elif name == "WRMSPE":
                per_series.append(math.sqrt(sum(v * v for v in se) / sum(abs(v) for v in sy)))
            else:
                c = consts.get("clamp", 1.0)
                per_series.append(_mean([abs(v) for v in se]) / max(c, _mean([abs(v) for v in sy])))
        return _mean(per_series)

    if name in ("sME", "sMSE", "sMAE"):
        terms = []
        for sid, _o, _k, yi, fi in rows:
            scale = _mean(list(train[sid]))
            ei = yi - fi
            if name == "sME":
                terms.append(ei / scale)
            elif name == "sMSE":
                terms.append((ei / scale) ** 2)
            else:
                terms.append(abs(ei) / scale)
        return _mean(terms)

    if name == "ND":
        return sum(abs(v) for v in e) / sum(abs(v) for v in y)
    if name == "NRMSE":
        return math.sqrt(_mean([v * v for v in e])) / _mean([abs(v) for v in y])

    if name in ("MRAE", "MdRAE", "RMRSE", "GMRAE", "RGRMSE"):
        r = []
        for (sid, o, k, yi, fi) in rows:
            eb = yi - benchmark[(sid, o, k)]
            r.append((yi - fi) / eb)
        if name == "MRAE":
            return _mean([abs(v) for v in r])
        if name == "MdRAE":
            return _median([abs(v) for v in r])
        if name == "RMRSE":
            return math.sqrt(_mean([v * v for v in r]))
        if name == "GMRAE":
            return _gmean([abs(v) for v in r])
        prod = 1.0
        for v in r:
            prod *= v * v
        return prod ** (1.0 / (2 * len(r)))

    if name in ("RelMAE", "RelMSE", "RelRMSE"):
        per_series = []
        for sid in _series_order(rows):
            sr = _series_rows(rows, sid)
            se = _errors(sr)
            seb = [yi - benchmark[(s, o, k)] for (s, o, k, yi, _f) in sr]
            if name == "RelMAE":
                per_series.append(_mean([abs(v) for v in se]) / _mean([abs(v) for v in seb]))
            elif name == "RelMSE":
                per_series.append(_mean([v * v for v in se]) / _mean([v * v for v in seb]))
            else:
                per_series.append(
                    math.sqrt(_mean([v * v for v in se]) / _mean([v * v for v in seb]))
                )
        return _mean(per_series)

    if name == "RSE":
        ybar = _mean(y)
        return math.sqrt(sum(v * v for v in e)) / math.sqrt(sum((v - ybar) ** 2 for v in y))

    if name == "AvgRelMAE":
        prod = 1.0
        total_h = 0
        for sid in _series_order(rows):
            sr = _series_rows(rows, sid)
            se = _errors(sr)
            seb = [yi - benchmark[(s, o, k)] for (s, o, k, yi, _f) in sr]
            ratio = _mean([abs(v) for v in se]) / _mean([abs(v) for v in seb])
            prod *= ratio ** len(sr)
            total_h += len(sr)
        return prod ** (1.0 / total_h)

    if name in ("MASE", "MdASE", "RMSSE"):
        m = consts.get("seasonal_period") or 1
        terms = []
        for sid, _o, _k, yi, fi in rows:
            tv = list(train[sid])
            diffs = [tv[i] - tv[i - m] for i in range(m, len(tv))]
            if name == "RMSSE":
                scale = _mean([d * d for d in diffs])
                terms.append((yi - fi) ** 2 / scale)
            else:
                scale = _mean([abs(d) for d in diffs])
                terms.append(abs(yi - fi) / scale)
        if name == "MASE":
            return _mean(terms)
        if name == "MdASE":
            return _median(terms)
        return math.sqrt(_mean(terms))

    if name == "RMSLE":
        l = [math.log(yi + 1.0) - math.log(fi + 1.0) for yi, fi in zip(y, f)]
        return math.sqrt(_mean([v * v for v in l]))
    if name == "NWRMSLE":
        l = [math.log(yi + 1.0) - math.log(fi + 1.0) for yi, fi in zip(y, f)]
        w = list(weights)
        return math.sqrt(sum(wi * li * li for wi, li in zip(w, l)) / sum(w))

    if name in ("MSR", "MAR"):
        c_terms = []
        groups = []
        for sid, o, *_ in rows:
            if (sid, o) not in groups:
                groups.append((sid, o))
        for sid, o in groups:
            window = sorted(
                [r for r in rows if r[0] == sid and r[1] == o], key=lambda r: r[2]
            )
            running = 0.0
            for i, (_s, _o, _k, yi, fi) in enumerate(window, start=1):
                running += yi
                c_terms.append(fi - running / i)
        if name == "MSR":
            return _mean([v * v for v in c_terms])
        return _mean([abs(v) for v in c_terms])

    if name == "WMAE":
        w = list(weights)
        return sum(wi * abs(ei) for wi, ei in zip(w, e)) / sum(w)

    if name == "CORR":
        per_series = []
        for sid in _series_order(rows):
            sr = _series_rows(rows, sid)
            sy = [r[3] for r in sr]
            sf = [r[4] for r in sr]
            my, mf = _mean(sy), _mean(sf)
            num = sum((a - my) * (b - mf) for a, b in zip(sy, sf))
            den = math.sqrt(
                sum((a - my) ** 2 for a in sy) * sum((b - mf) ** 2 for b in sf)
            )
            per_series.append(num / den)
        return _mean(per_series)

    raise KeyError(f"oracle does not know measure {name!r}")


ORACLE_MEASURES = [
    "ME", "ErrorStd", "MSE", "RMSE", "MAE", "MdAE", "RMdSE", "GMAE", "GRMSE",
    "MAPE", "MdAPE", "RMSPE", "RMdSPE", "sMAPE", "sMdAPE", "msMAPE", "MAAPE",
    "WAPE", "sWAPE", "WRMSPE", "RTAE", "sME", "sMSE", "sMAE", "ND", "NRMSE",
    "MRAE", "MdRAE", "RMRSE", "GMRAE", "RGRMSE",
    "RelMAE", "RelMSE", "RelRMSE", "RSE", "AvgRelMAE",
    "MASE", "MdASE", "RMSSE",
    "RMSLE", "NWRMSLE",
    "MSR", "MAR", "WMAE", "CORR",
]
