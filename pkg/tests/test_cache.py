"""Tests for the complex cache and the results store."""

import json
import os

import pytest

from bianchivoronoi.cache import (
    CacheCorruptedError,
    cache_path,
    canonical_json,
    complex_hash,
    list_records,
    load_complex,
    load_record,
    rebuild_index,
    record_path,
    save_complex,
    save_error,
    save_record,
    serialize_complex,
)
from bianchivoronoi.cellcomplex import build_complex
from bianchivoronoi.pipeline import compute_record
from bianchivoronoi.qfield import OrderContext
from bianchivoronoi.voronoi import enumerate_perfect_forms
from bianchivoronoi.zhomology import complex_homology


@pytest.fixture(scope="module")
def small_complex():
    ctx = OrderContext(-20)
    graph = enumerate_perfect_forms(ctx, "gl")
    return graph, build_complex(graph)


class TestComplexCache:
    def test_bit_exact_round_trip(self, small_complex, tmp_path):
        graph, cx = small_complex
        save_complex(str(tmp_path), graph, cx)
        raw = open(cache_path(str(tmp_path), -20, "gl")).read()
        loaded = load_complex(str(tmp_path), -20, "gl")
        assert canonical_json(loaded.doc) == raw
        assert loaded.counts == cx.counts
        assert loaded.d2 == cx.d2
        assert loaded.d3 == cx.d3
        assert loaded.n_classes == len(graph.classes)

    def test_exact_values_survive(self, small_complex, tmp_path):
        graph, cx = small_complex
        save_complex(str(tmp_path), graph, cx)
        loaded = load_complex(str(tmp_path), -20, "gl")
        assert loaded.forms == [P.form.coords for P in graph.classes]
        assert loaded.min_vectors == [list(P.min_all) for P in graph.classes]
        assert loaded.witnesses == [list(adj) for adj in graph.adjacency]

    def test_homology_from_cache_alone(self, small_complex, tmp_path):
        graph, cx = small_complex
        save_complex(str(tmp_path), graph, cx)
        loaded = load_complex(str(tmp_path), -20, "gl")
        direct = complex_homology(cx.counts, cx.d2, cx.d3)
        cached = complex_homology(loaded.counts, loaded.d2, loaded.d3)
        assert direct.betti == cached.betti
        assert direct.torsion == cached.torsion

    def test_missing_returns_none(self, tmp_path):
        assert load_complex(str(tmp_path), -20, "gl") is None

    def test_bad_json_raises(self, small_complex, tmp_path):
        path = cache_path(str(tmp_path), -20, "gl")
        os.makedirs(os.path.dirname(path))
        with open(path, "w") as fh:
            fh.write("{ truncated")
        with pytest.raises(CacheCorruptedError):
            load_complex(str(tmp_path), -20, "gl")

    def test_version_and_identity_checks(self, small_complex, tmp_path):
        graph, cx = small_complex
        doc = serialize_complex(graph, cx)
        path = cache_path(str(tmp_path), -20, "gl")
        os.makedirs(os.path.dirname(path))
        bad = dict(doc, version=999)
        with open(path, "w") as fh:
            fh.write(canonical_json(bad))
        with pytest.raises(CacheCorruptedError):
            load_complex(str(tmp_path), -20, "gl")
        bad = dict(doc, D=-24)
        with open(path, "w") as fh:
            fh.write(canonical_json(bad))
        with pytest.raises(CacheCorruptedError):
            load_complex(str(tmp_path), -20, "gl")

    def test_hash_is_content_addressed(self, small_complex):
        graph, cx = small_complex
        doc = serialize_complex(graph, cx)
        assert complex_hash(doc) == complex_hash(json.loads(canonical_json(doc)))


class TestResultsStore:
    def test_save_load_list(self, tmp_path):
        rec = compute_record(-3, "gl")
        save_record(str(tmp_path), rec, {"total_s": 1.0})
        assert load_record(str(tmp_path), -3, "gl") == rec
        assert load_record(str(tmp_path), -3, "sl") is None
        assert list_records(str(tmp_path)) == [rec]
        assert os.path.exists(record_path(str(tmp_path), -3, "gl"))
        meta = record_path(str(tmp_path), -3, "gl")[:-5] + ".meta.json"
        assert json.load(open(meta)) == {"total_s": 1.0}

    def test_record_round_trips_losslessly(self, tmp_path):
        rec = compute_record(-15, "sl")
        save_record(str(tmp_path), rec)
        assert load_record(str(tmp_path), -15, "sl") == rec

    def test_index_is_deterministic(self, tmp_path):
        for D in (-3, -4):
            save_record(str(tmp_path), compute_record(D, "gl"))
        rebuild_index(str(tmp_path))
        first = open(os.path.join(str(tmp_path), "results", "index.csv")).read()
        rebuild_index(str(tmp_path))
        again = open(os.path.join(str(tmp_path), "results", "index.csv")).read()
        assert first == again
        assert first.splitlines()[0].startswith("flavor,D,h,class_group")
        assert len(first.splitlines()) == 3

    def test_save_error(self, tmp_path):
        path = save_error(str(tmp_path), -427, "sl", "boom")
        assert open(path).read() == "boom\n"

    def test_warm_and_cold_records_identical(self, tmp_path):
        tel1, tel2 = {}, {}
        cold = compute_record(-23, "sl", cache_dir=str(tmp_path), telemetry=tel1)
        warm = compute_record(-23, "sl", cache_dir=str(tmp_path), telemetry=tel2)
        assert (tel1["cache"], tel2["cache"]) == ("miss", "hit")
        assert cold == warm
        assert cold == compute_record(-23, "sl")
