import json

import pytest

from eqpres.catalog import builtin
from eqpres.deweak import deweakify
from eqpres.errors import ParseError, PresentationFileError
from eqpres.files import (
    CERTIFICATE_FILENAME,
    build_certificate,
    canonical_json,
    check_certificate,
    from_equivariant,
    load_certificate,
    load_presentation,
    save_certificate,
    save_model,
    save_presentation,
    to_equivariant,
)
from eqpres.models import CertificateBundle, PresentationFile


def _write(tmp_path, payload, name="p.json"):
    path = tmp_path / name
    path.write_text(json.dumps(payload), encoding="utf-8")
    return path


def _payload(name, n):
    return builtin(name, n).model_dump(mode="json")


def test_canonical_json_is_sorted_and_newline_terminated():
    text = canonical_json({"b": 1, "a": [1, 2]})
    assert text.endswith("\n")
    assert text.index('"a"') < text.index('"b"')


def test_presentation_round_trip_is_canonical(tmp_path):
    path = tmp_path / "star.json"
    save_model(path, builtin("star", 3))
    save_presentation(path, load_presentation(path))
    first = path.read_text(encoding="utf-8")
    save_presentation(path, load_presentation(path))
    assert path.read_text(encoding="utf-8") == first
    assert json.loads(first)["relators"][0] == "s.0^2"


def test_from_equivariant_keeps_weak_data():
    pf = builtin("hyperpair", 3)
    back = from_equivariant(to_equivariant(pf))
    assert back == pf


def test_reject_non_bijective_gamma_generator(tmp_path):
    payload = _payload("z2sum", 3)
    payload["gamma"]["generators"][0]["images"] = [0, 0, 2]
    with pytest.raises(PresentationFileError):
        load_presentation(_write(tmp_path, payload))


def test_reject_missing_orbit_action(tmp_path):
    payload = _payload("z2sum", 3)
    payload["orbits"][0]["action"] = payload["orbits"][0]["action"][:1]
    with pytest.raises(PresentationFileError):
        load_presentation(_write(tmp_path, payload))


def test_reject_weak_mode_without_iota(tmp_path):
    payload = _payload("hyperoct", 2)
    payload["iota"] = []
    with pytest.raises(PresentationFileError):
        load_presentation(_write(tmp_path, payload))


def test_reject_iota_in_finite_mode(tmp_path):
    payload = _payload("hyperoct", 2)
    payload["mode"] = "finite"
    with pytest.raises(PresentationFileError):
        load_presentation(_write(tmp_path, payload))


def test_missing_file(tmp_path):
    with pytest.raises(PresentationFileError):
        load_presentation(tmp_path / "absent.json")


def test_bad_relator_text_names_the_relator(tmp_path):
    payload = _payload("z2sum", 2)
    payload["relators"].append("s.0 ^")
    with pytest.raises(ParseError) as excinfo:
        load_presentation(_write(tmp_path, payload))
    assert excinfo.value.context == ["in relator 2: 's.0 ^'"]
    assert "relator 2" in str(excinfo.value)
    assert excinfo.value.to_payload()["message"].startswith("expected an integer exponent")


def test_certificate_round_trip_and_check(tmp_path):
    ep = to_equivariant(builtin("hyperpair", 3))
    result = deweakify(ep)
    bundle = build_certificate(result)
    path = save_certificate(tmp_path, bundle)
    assert path.name == CERTIFICATE_FILENAME
    loaded = load_certificate(tmp_path)
    assert loaded == bundle
    assert loaded.presentation == result.presentation.name
    report = check_certificate(loaded, result.presentation)
    assert report.passed
    assert report.num_traces == report.valid_traces == 36


def test_tampered_certificate_fails(tmp_path):
    ep = to_equivariant(builtin("hyperoct", 3))
    result = deweakify(ep)
    bundle = build_certificate(result)
    payload = bundle.model_dump(mode="json")
    record = next(r for r in payload["traces"] if r["steps"])
    record["end"] = record["start"]
    tampered = CertificateBundle.model_validate(payload)
    report = check_certificate(tampered, result.presentation)
    assert not report.passed
    assert report.valid_traces == report.num_traces - 1


def test_incomplete_certificate_misses_pairs():
    ep = to_equivariant(builtin("hyperoct", 2))
    result = deweakify(ep)
    bundle = build_certificate(result)
    partial = bundle.model_copy(update={"traces": bundle.traces[:-1]})
    report = check_certificate(partial, result.presentation)
    names = {check.name: check.passed for check in report.checks}
    assert names["traces_replay"]
    assert not names["all_pairs_covered"]


def test_presentation_model_rejects_unknown_generator():
    payload = _payload("z2sum", 2)
    payload["orbits"][0]["action"][0]["generator"] = "zz"
    with pytest.raises(ValueError):
        PresentationFile.model_validate(payload)
