import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ffpsk.appendix import CORRECTIONS, appendix_matrix
from ffpsk.receiver import DomainError, ReceiverConfig, exact_channel_matrix


@pytest.mark.parametrize("variant,M", [("a1_4psk", 4), ("a2_3psk", 3)])
def test_vacuum_without_dark_counts_matches_exactly(variant, M):
    audit = appendix_matrix(ReceiverConfig(M=M, alpha_sq=0.0, gamma=0.0), variant)
    assert np.all(audit.diff == 0)
    assert np.array_equal(audit.printed, audit.exact)


@pytest.mark.parametrize("r2", [0.5, 0.3])
def test_printed_row_zero_deviation_is_the_typo_terms(r2):
    audit = appendix_matrix(ReceiverConfig(M=4, alpha_sq=1.0, r2=r2), "a1_4psk")
    row0 = [d for d in audit.discrepancies if d.i == 0]
    assert sorted((d.j, d.term) for d in row0) == [(1, 3), (2, 1), (3, 3)]
    delta = sum(d.printed_value - d.corrected_value for d in row0)
    assert audit.row_sums[0] - 1.0 == pytest.approx(delta, abs=1e-15)
    assert np.all(np.abs(audit.diff[0, 1:]) > 1e-12)


def test_printed_row_zero_typos_cancel_only_at_equal_stage_fractions():
    # with r1*r2 == r1*(1-r2) the three deltas cancel up to O(gamma^2)
    balanced = appendix_matrix(ReceiverConfig(M=4, alpha_sq=1.0), "a1_4psk")
    assert abs(balanced.row_sums[0] - 1.0) <= 1e-15
    skewed = appendix_matrix(ReceiverConfig(M=4, alpha_sq=1.0, r2=0.3), "a1_4psk")
    assert abs(skewed.row_sums[0] - 1.0) > 1e-12


@pytest.mark.parametrize("alpha_sq", [0.25, 1.0, 4.0])
def test_consistent_rows_of_4psk_table(alpha_sq):
    audit = appendix_matrix(ReceiverConfig(M=4, alpha_sq=alpha_sq), "a1_4psk")
    assert np.max(np.abs(audit.diff[1])) <= 1e-12
    assert np.max(np.abs(audit.diff[2])) <= 1e-12
    assert np.max(np.abs(audit.diff[3, [0, 1, 3]])) <= 1e-12


@pytest.mark.parametrize("alpha_sq", [0.25, 1.0, 4.0])
def test_printed_p2_given_3_is_off_by_a_click_factor(alpha_sq):
    audit = appendix_matrix(ReceiverConfig(M=4, alpha_sq=alpha_sq), "a1_4psk")
    (d,) = [d for d in audit.discrepancies if (d.i, d.j) == (3, 2)]
    assert audit.diff[3, 2] == pytest.approx(d.printed_value - d.corrected_value, abs=1e-15)
    assert abs(audit.row_sums[3] - 1.0) > 1e-3


@pytest.mark.parametrize("variant,M", [("a1_4psk", 4), ("a2_3psk", 3)])
@pytest.mark.parametrize("alpha_sq", [0.25, 1.0, 4.0])
def test_discrepancies_confined_to_listed_terms(variant, M, alpha_sq):
    audit = appendix_matrix(ReceiverConfig(M=M, alpha_sq=alpha_sq), variant)
    listed = {(d.i, d.j) for d in audit.discrepancies}
    assert set(audit.flagged_entries()) <= listed
    assert np.max(np.abs(audit.corrected - audit.exact)) <= 1e-12


def test_3psk_garbled_entry_agrees_at_default_splitters():
    audit = appendix_matrix(ReceiverConfig(M=3, alpha_sq=1.0), "a2_3psk")
    garbled = [d for d in audit.discrepancies if (d.i, d.j) == (2, 2)]
    assert len(garbled) == 2
    assert all(d.printed != d.corrected for d in garbled)
    # 1-r1 = r1(1-r2) = 1/3 hides the garbling numerically
    assert abs(audit.diff[2, 2]) <= 1e-12


def test_3psk_row_one_misses_a_dark_count_path():
    audit = appendix_matrix(ReceiverConfig(M=3, alpha_sq=1.0), "a2_3psk")
    (missing,) = [d for d in audit.discrepancies if d.printed is None]
    assert (missing.i, missing.j) == (1, 2)
    assert audit.row_sums[1] - 1.0 == pytest.approx(-missing.corrected_value, abs=1e-15)


def test_corrections_table_layout():
    variants = {k[0] for k in CORRECTIONS}
    assert variants == {"a1_4psk", "a2_3psk"}


splitters = st.tuples(st.floats(0.2, 0.8), st.floats(0.2, 0.8), st.floats(0, 5), st.floats(0.1, 1), st.floats(0, 0.1))


@settings(max_examples=100, deadline=None)
@given(splitters)
def test_corrected_4psk_table_is_the_tree(params):
    r1, r2, a, eta, gamma = params
    c = ReceiverConfig(M=4, alpha_sq=a, eta=eta, gamma=gamma, r1=r1, r2=r2)
    audit = appendix_matrix(c, "a1_4psk")
    assert np.max(np.abs(audit.corrected - audit.exact)) <= 1e-12


@settings(max_examples=100, deadline=None)
@given(splitters)
def test_corrected_3psk_table_swaps_last_two_stages(params):
    # the 3-PSK table feeds r1(1-r2) to stage 2; reflectance 1-r2 restores the tree order
    r1, r2, a, eta, gamma = params
    c = ReceiverConfig(M=3, alpha_sq=a, eta=eta, gamma=gamma, r1=r1, r2=r2)
    swapped = ReceiverConfig(M=3, alpha_sq=a, eta=eta, gamma=gamma, r1=r1, r2=1 - r2)
    corrected = appendix_matrix(c, "a2_3psk").corrected
    assert np.max(np.abs(corrected - np.asarray(exact_channel_matrix(swapped)))) <= 1e-12


def test_variant_must_match_symbol_count():
    with pytest.raises(DomainError):
        appendix_matrix(ReceiverConfig(M=3), "a1_4psk")
    with pytest.raises(DomainError):
        appendix_matrix(ReceiverConfig(M=4), "a3")
