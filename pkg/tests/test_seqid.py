"""Sequence extraction, snapshot ingestion, and offline fingerprinting."""

import math

import pytest

from cfkit import (
    NonIntegerTermError,
    Side,
    bundled_snapshot,
    convergents,
    extract_integer_sequence,
    ingest_stripped_file,
    load_fixture,
    lookup_local,
    online_query_string,
)
from cfkit.seqid import (
    QueryError,
    SequenceMatch,
    SequenceSnapshot,
    SnapshotError,
    ingest_stripped_text,
)


@pytest.fixture(scope="module")
def snapshot():
    return bundled_snapshot()


class TestExtract:
    def test_second_formula_a_side(self):
        rows = convergents(load_fixture("e_cf2"), 4)
        assert extract_integer_sequence(rows, Side.A) == [3, 11, 49, 261, 1631]

    def test_second_formula_b_side(self):
        rows = convergents(load_fixture("e_cf2"), 4)
        assert extract_integer_sequence(rows, Side.B) == [1, 4, 18, 96, 600]

    def test_rational_sequence_rejected_with_index(self):
        rows = convergents(load_fixture("e_cf1t"), 6)
        with pytest.raises(NonIntegerTermError) as err:
            extract_integer_sequence(rows, Side.B)
        # B_0 = B_1 = 1 are integral; B_2 = 3/2 is the first non-integer
        assert err.value.index == 2
        assert "3/2" in str(err.value)

    def test_empty_input_rejected(self):
        with pytest.raises(QueryError):
            extract_integer_sequence([], Side.A)


class TestLookupLocal:
    def test_a001339_shift_one(self, snapshot):
        matches = lookup_local([3, 11, 49, 261, 1631], snapshot)
        assert SequenceMatch("A001339", 1, 5) in matches

    def test_a001563_shift_one(self, snapshot):
        matches = lookup_local([1, 4, 18, 96, 600], snapshot)
        assert SequenceMatch("A001563", 1, 5) in matches

    def test_noise_query_matches_nothing(self, snapshot):
        assert lookup_local([5, 7, 11, 999999], snapshot) == []

    def test_query_too_short(self, snapshot):
        with pytest.raises(QueryError, match="too short"):
            lookup_local([1, 2, 3], snapshot)

    def test_shift_zero_match(self, snapshot):
        # B-side of the prefix form of the first formula: 1, 1, 3, 11, 53
        rows = convergents(load_fixture("e_cf1"), 4)
        seq = extract_integer_sequence(rows, Side.B)
        matches = lookup_local(seq, snapshot)
        assert SequenceMatch("A000255", 0, 5) in matches

    def test_max_shift_limits_the_search(self, snapshot):
        full = snapshot.sequences["A000142"]
        query = list(full[3:8])
        assert lookup_local(query, snapshot, max_shift=2) == []
        assert SequenceMatch("A000142", 3, 5) in lookup_local(query, snapshot, max_shift=3)

    def test_sorted_by_identifier_then_shift(self):
        periodic = SequenceSnapshot(
            {"A000002": (0, 1, 2, 1, 2, 1, 2), "A000001": (1, 2, 1, 2, 1, 2, 1)}
        )
        matches = lookup_local([1, 2, 1, 2], periodic, max_shift=4)
        assert [(m.identifier, m.shift) for m in matches] == [
            ("A000001", 0),
            ("A000001", 2),
            ("A000002", 1),
            ("A000002", 3),
        ]

    def test_exhaustive_over_random_slices(self, rng, snapshot):
        for _ in range(60):
            identifier = rng.choice(sorted(snapshot.sequences))
            terms = snapshot.sequences[identifier]
            if len(terms) < 4:
                continue
            length = rng.randint(4, min(8, len(terms)))
            shift = rng.randint(0, len(terms) - length)
            query = list(terms[shift : shift + length])
            matches = lookup_local(query, snapshot, max_shift=shift)
            assert SequenceMatch(identifier, shift, length) in matches


class TestIngest:
    def test_single_line(self, tmp_path):
        path = tmp_path / "mini.stripped"
        path.write_text("A001339 ,1,3,11,49,261,1631,\n")
        snap = ingest_stripped_file(path)
        assert snap.sequences == {"A001339": (1, 3, 11, 49, 261, 1631)}

    def test_comments_skipped(self, tmp_path):
        path = tmp_path / "mini.stripped"
        path.write_text("# OEIS header\nA000045 ,0,1,1,2,3,\n")
        snap = ingest_stripped_file(path)
        assert list(snap.sequences) == ["A000045"]
        assert snap.malformed == ()

    def test_malformed_line_reported_with_number(self, tmp_path):
        path = tmp_path / "mini.stripped"
        path.write_text("A000045 ,0,1,1,2,\nA00xyz ,1,2,\n")
        snap = ingest_stripped_file(path)
        assert list(snap.sequences) == ["A000045"]
        assert snap.malformed == ((2, "not in stripped format"),)

    def test_zero_parseable_lines(self, tmp_path):
        path = tmp_path / "empty.stripped"
        path.write_text("# nothing here\n")
        with pytest.raises(SnapshotError, match="no parseable"):
            ingest_stripped_file(path)

    def test_unreadable_file(self, tmp_path):
        with pytest.raises(SnapshotError, match="cannot read"):
            ingest_stripped_file(tmp_path / "missing.stripped")

    def test_roundtrip(self, snapshot):
        again = ingest_stripped_text(snapshot.to_stripped())
        assert again == snapshot

    def test_negative_terms_roundtrip(self):
        snap = SequenceSnapshot({"A000001": (1, -1, 2, -6)})
        assert ingest_stripped_text(snap.to_stripped()) == snap


class TestBundledSnapshot:
    def test_size_is_curated(self, snapshot):
        assert 3 <= len(snapshot) <= 50

    def test_required_sequences_present(self, snapshot):
        for identifier in ("A001339", "A000142", "A001563"):
            assert identifier in snapshot.sequences

    def test_values_against_formula_oracles(self, snapshot):
        seqs = snapshot.sequences
        for n, value in enumerate(seqs["A000142"]):
            assert value == math.factorial(n)
        for n, value in enumerate(seqs["A001563"]):
            assert value == n * math.factorial(n)
        for n, value in enumerate(seqs["A001339"]):
            assert value == sum(math.factorial(k + 1) * math.comb(n, k) for k in range(n + 1))
        for n, value in enumerate(seqs["A001048"], start=1):
            assert value == math.factorial(n) + math.factorial(n - 1)
        for n, value in enumerate(seqs["A000522"]):
            assert value == sum(math.factorial(n) // math.factorial(k) for k in range(n + 1))
        d = [1]
        for n in range(1, len(seqs["A000166"])):
            d.append(n * d[-1] + (-1) ** n)
        assert list(seqs["A000166"]) == d


class TestOnlineQueryString:
    def test_exact_url(self):
        assert (
            online_query_string([3, 11, 49, 261])
            == "https://oeis.org/search?q=3,11,49,261&fmt=json"
        )

    def test_single_term(self):
        assert online_query_string([1]) == "https://oeis.org/search?q=1&fmt=json"

    def test_negative_terms_keep_their_sign(self):
        assert (
            online_query_string([-1, 2, -6])
            == "https://oeis.org/search?q=-1,2,-6&fmt=json"
        )

    def test_empty_rejected(self):
        with pytest.raises(QueryError):
            online_query_string([])
