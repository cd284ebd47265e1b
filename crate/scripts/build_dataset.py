#!/usr/bin/env python3
"""Build the curve dataset shipped in data/.

Inputs are the Cremona mini database (sqlite, shipped by the
`sagemath-data-elliptic-curves` wheel) and PARI/GP via cypari2 (shipped by the
`passagemath-pari` wheel). PARI supplies Tamagawa numbers, analytic Sha for
rank-0 curves. LMFDB labels are
derived from Cremona data: isogeny classes are ordered lexicographically by
their a_p sequence (all primes, bad ones included) and curves inside a class
lexicographically by a-invariants.

usage: build_dataset.py CREMONA_MINI_DB OUT.jsonl MAX_CONDUCTOR [EXTRA_CONDUCTOR ...]
"""
import json
import sqlite3
import sys

import cypari2

pari = cypari2.Pari()
pari.allocatemem(2 * 10**9, silent=True)


def letters(i):
    s = ""
    i += 1
    while i > 0:
        i, r = divmod(i - 1, 26)
        s = chr(ord("a") + r) + s
    return s


def main():
    db, out, max_n = sys.argv[1], sys.argv[2], int(sys.argv[3])
    extra = [int(x) for x in sys.argv[4:]]
    con = sqlite3.connect(db)
    conductors = [r[0] for r in con.execute(
        "select distinct conductor from t_class where conductor <= ? order by conductor", (max_n,))]
    conductors += [n for n in extra if n not in conductors]
    primes = [int(p) for p in pari.primes(60)]
    with open(out, "w") as fh:
        for n in conductors:
            classes = con.execute(
                "select class, rank from t_class where conductor = ?", (n,)).fetchall()
            keyed = []
            for cls, rank in classes:
                curves = con.execute(
                    "select curve, tors, eqn from t_curve where class = ?", (cls,)).fetchall()
                e0 = pari.ellinit(json.loads(curves[0][2]))
                aps = [int(pari.ellap(e0, p)) for p in primes]
                keyed.append((aps, cls, rank, curves))
            keyed.sort(key=lambda t: t[0])
            for ci, (_, cls, rank, curves) in enumerate(keyed):
                curves = sorted(curves, key=lambda c: json.loads(c[2]))
                for k, (cremona, tors, eqn) in enumerate(curves):
                    ainvs = json.loads(eqn)
                    e = pari.ellinit(ainvs)
                    gr = pari.ellglobalred(e)
                    assert int(gr[0]) == n
                    fac = gr[3]
                    local = gr[4]
                    tam = {}
                    cprod = 1
                    for i in range(len(local)):
                        p = int(fac[i, 0])
                        c = int(local[i][3])
                        tam[str(p)] = c
                        cprod *= c
                    assert int(pari.elltors(e)[0]) == tors
                    rec = {
                        "label": f"{n}.{letters(ci)}{k + 1}",
                        "cremona": cremona,
                        "ainvs": ainvs,
                        "conductor": n,
                        "rank": rank,
                        "torsion": tors,
                        "tamagawa": tam,
                    }
                    if rank == 0:
                        omega = e.omega()[0].real()
                        if e.disc() > 0:
                            omega *= 2
                        sha = float(pari.lfun(e, 1)) * tors * tors / (float(omega) * cprod)
                        rec["sha"] = round(sha)
                        assert abs(sha - round(sha)) < 1e-6, (cremona, sha)
                    fh.write(json.dumps(rec, separators=(",", ":")) + "\n")


if __name__ == "__main__":
    main()
