import json
from math import gcd

import numpy as np
import pytest

from lensiso.chartables import GeneratorChoice
from lensiso.numtheory import classify_shape, unit_residues
from lensiso.search import (
    FILTERS,
    CheckpointError,
    SearchTask,
    candidate_count,
    canonical_s,
    canonicalize,
    enumerate_choices,
    passes_filter,
    run_search,
)

from conftest import all_choices


def orbit(q, s):
    return {tuple(sorted((u * x) % q for x in s)) for u in unit_residues(q).residues}


def test_enumerate_examples():
    assert [c.s_pm for c in enumerate_choices(5, 1)] == [(1, 4)]
    assert [c.s_pm for c in enumerate_choices(7, 2)] == [(1, 2, 5, 6)]
    assert candidate_count(11, 2) == 4
    brute = {min(orbit(11, c.s_pm)) for c in all_choices(11) if c.k == 2}
    assert {c.s_pm for c in enumerate_choices(11, 2)} == brute


def test_enumerate_rejects_bad_input():
    with pytest.raises(ValueError, match="unsupported"):
        enumerate_choices(12, 1)
    with pytest.raises(ValueError, match="infeasible"):
        enumerate_choices(7, 3)
    with pytest.raises(ValueError, match="infeasible"):
        enumerate_choices(7, 0)


def test_canonicalize_examples():
    assert canonicalize(GeneratorChoice.from_s(7, [1, 3, 4, 6])).s_pm == (1, 2, 5, 6)
    assert canonicalize(GeneratorChoice.from_s(5, [2, 3])).s_pm == (1, 4)
    c = GeneratorChoice.from_s(13, [1, 12, 5, 8])
    assert canonicalize(canonicalize(c)) == canonicalize(c)


def test_orbit_partition_matches_brute_force():
    for q in range(5, 20):
        if not classify_shape(q).supported:
            continue
        everything = all_choices(q)
        for k in range(1, len(unit_residues(q).half())):
            listed = [c.s_pm for c in enumerate_choices(q, k)]
            assert listed == sorted(listed)
            brute = {min(orbit(q, c.s_pm)) for c in everything if c.k == k}
            assert set(listed) == brute, (q, k)
            assert len(listed) == len(set(listed))
            for s in listed:
                assert canonical_s(q, s) == s


def test_canonical_form_is_unit_invariant():
    for c in all_choices(15)[::3]:
        for u in unit_residues(15).residues:
            assert canonicalize(c.scaled(u)) == canonicalize(c)


def test_filters():
    assert passes_filter([True, False], "any-equality")
    assert not passes_filter([False, False], "any-equality")
    assert passes_filter([False, False], "all")
    assert passes_filter([False, True, True], "forms-not-functions")
    assert not passes_filter([True, True, True], "forms-not-functions")
    # nontrivial: two runs of length >= 2, or one that starts after degree 0
    assert passes_filter([True, True, False, True, True], "nontrivial")
    assert passes_filter([False, True, True, False], "nontrivial")
    assert not passes_filter([True, True, False, True], "nontrivial")
    assert not passes_filter([False, True, False, True], "nontrivial")
    assert passes_filter([False, False, True, True], "nontrivial")
    with pytest.raises(ValueError):
        passes_filter([True], "bogus")


def test_single_class_search():
    res = run_search(SearchTask(5, 1))
    assert res.class_count == 1 and res.reports == [] and res.complete


def test_task_validation():
    with pytest.raises(ValueError):
        SearchTask(12, 2)
    with pytest.raises(ValueError):
        SearchTask(13, 1, filter="nope")
    with pytest.raises(ValueError):
        SearchTask(13, 1, jobs=0)
    assert SearchTask(62, 2, allow_even=True).shape.kind == "semiprime"


def test_all_filter_matches_direct_comparison():
    from lensiso.spectra import build_profile, compare_profiles
    res = run_search(SearchTask(29, 3, filter="all"))
    cls = enumerate_choices(29, 3)
    n = len(cls)
    assert len(res.reports) == n * (n - 1) // 2
    profs = {c.s_pm: build_profile(c) for c in cls}
    for r in res.reports[::17]:
        assert r == compare_profiles(profs[r.choice_a], profs[r.choice_b])


def test_search_is_deterministic_across_jobs(tmp_path):
    a = run_search(SearchTask(37, 3, filter="any-equality", batch_size=8))
    b = run_search(SearchTask(37, 3, filter="any-equality", batch_size=8, jobs=2))
    assert a.reports == b.reports and len(a.reports) > 0


def test_checkpoint_resume(tmp_path):
    path = str(tmp_path / "ck.jsonl")
    full = run_search(SearchTask(31, 3, filter="any-equality"))
    part = run_search(SearchTask(31, 3, filter="any-equality", chunk=(0, 20), checkpoint=path, batch_size=6))
    assert not part.complete and part.classes_covered == 20
    again = run_search(SearchTask(31, 3, filter="any-equality", chunk=(10, 10**6), checkpoint=path,
                                batch_size=6))
    assert again.complete and again.reports == full.reports
    lines = open(path).read().splitlines()
    head = json.loads(lines[0])
    assert head["format"] == "lensiso-checkpoint" and head["q"] == 31 and head["k"] == 3
    indices = [rec["index"] for ln in lines[1:] for rec in json.loads(ln)["records"]]
    assert sorted(indices) == list(range(full.class_count))


def test_checkpoint_torn_tail_is_dropped(tmp_path):
    path = tmp_path / "ck.jsonl"
    run_search(SearchTask(31, 3, chunk=(0, 12), checkpoint=str(path), batch_size=6))
    text = path.read_text()
    path.write_text(text + '{"chunk": [12, 18], "records": [{"ind')
    res = run_search(SearchTask(31, 3, checkpoint=str(path), batch_size=6))
    assert res.complete and res.reports == run_search(SearchTask(31, 3)).reports
    for ln in path.read_text().splitlines():
        json.loads(ln)


def test_checkpoint_mismatch_rejected(tmp_path):
    path = str(tmp_path / "ck.jsonl")
    run_search(SearchTask(31, 3, chunk=(0, 5), checkpoint=path))
    with pytest.raises(CheckpointError, match="does not match"):
        run_search(SearchTask(31, 2, checkpoint=path))


def test_checkpoint_corruption_rejected(tmp_path):
    path = tmp_path / "ck.jsonl"
    run_search(SearchTask(31, 3, chunk=(0, 5), checkpoint=str(path)))
    lines = path.read_text().splitlines()
    path.write_text(lines[0] + "\nnot json\n" + "\n".join(lines[1:]) + "\n")
    with pytest.raises(CheckpointError, match="corrupt"):
        run_search(SearchTask(31, 3, checkpoint=str(path)))
    path.write_text("garbage\n")
    with pytest.raises(CheckpointError):
        run_search(SearchTask(31, 3, checkpoint=str(path)))


def test_checkpoint_io_error(tmp_path):
    with pytest.raises(CheckpointError):
        run_search(SearchTask(31, 3, checkpoint=str(tmp_path / "missing" / "ck.jsonl")))


def test_vector_mask_agrees_with_passes_filter():
    from itertools import product
    from lensiso.search import _filter_mask
    rows = np.array(list(product([False, True], repeat=7)))
    for name in FILTERS:
        assert _filter_mask(rows.copy(), name).tolist() == [passes_filter(r, name) for r in rows]


def test_default_filter_is_nontrivial():
    assert SearchTask(13, 2).filter == "nontrivial"


def test_digest_collisions_are_caught(monkeypatch):
    import lensiso.spectra as spectra
    honest = run_search(SearchTask(29, 3, filter="any-equality"))
    monkeypatch.setattr(spectra, "poly_digest", lambda h: "same")
    forged = run_search(SearchTask(29, 3, filter="any-equality"))
    assert forged.reports == honest.reports
