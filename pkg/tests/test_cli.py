import io

import pytest

from selpref import fixtures
from selpref.cli import EXIT_CAPACITY, EXIT_DATA, EXIT_USAGE, main


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name, text in [
        ("eat.tax", fixtures.EAT_TAXONOMY),
        ("eat.tsv", fixtures.EAT_OBSERVATIONS),
        ("drink.tax", fixtures.DRINK_TAXONOMY),
        ("drink.tsv", fixtures.DRINK_OBSERVATIONS),
        ("test.tsv", "eat\tobject\tmeat\tMEAT_CLASS\n"),
        ("freqs.tsv", "meat\tMEAT_CLASS\t3\nmeat\tCONTENT\t1\n"),
        ("cycle.tax", "synset A\nsynset B\nhyponym A B\nhyponym B A\n"),
        ("extra.tsv", fixtures.EAT_OBSERVATIONS + "eat\tobject\tpizza\t1\n"),
    ]:
        p = tmp_path / name
        p.write_text(text)
        paths[name] = str(p)
    return paths


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out)
    return code, out.getvalue()


def test_validate(files):
    code, out = run("validate", "--taxonomy", files["eat.tax"], "--observations", files["eat.tsv"])
    assert code == 0
    assert out.startswith("7 synsets, 4 words, 0 unknown nouns")


def test_validate_cycle(files, capsys):
    code, _ = run("validate", "--taxonomy", files["cycle.tax"])
    assert code == EXIT_DATA
    assert "A" in capsys.readouterr().err


def test_validate_unknown_noun(files):
    code, out = run("validate", "--taxonomy", files["eat.tax"], "--observations", files["extra.tsv"])
    assert code == EXIT_DATA
    assert "warning: noun not in taxonomy: pizza" in out


def test_rank_bbn(files):
    code, out = run(
        "rank", "--taxonomy", files["eat.tax"], "--observations", files["eat.tsv"],
        "--predicate", "eat", "--likely", "0.99", "--unlikely", "0.01",
    )
    assert code == 0
    assert out.splitlines()[3].startswith("1\tFOOD\t")


def test_rank_resnik(files):
    code, out = run(
        "rank", "--taxonomy", files["eat.tax"], "--observations", files["eat.tsv"],
        "--predicate", "eat", "--method", "resnik",
    )
    assert code == 0 and "method=resnik" in out


def test_rank_unknown_predicate(files, capsys):
    code, _ = run(
        "rank", "--taxonomy", files["eat.tax"], "--observations", files["eat.tsv"],
        "--predicate", "drink",
    )
    assert code == EXIT_DATA
    assert "no observations" in capsys.readouterr().err


def test_rank_skip_unknown(files):
    args = ["rank", "--taxonomy", files["eat.tax"], "--observations", files["extra.tsv"],
            "--predicate", "eat"]
    assert run(*args)[0] == EXIT_DATA
    assert run(*args, "--skip-unknown-nouns")[0] == 0


def test_width_limit_exit(files, capsys):
    code, _ = run(
        "rank", "--taxonomy", files["eat.tax"], "--observations", files["eat.tsv"],
        "--predicate", "eat", "--width-limit", "1",
    )
    assert code == EXIT_CAPACITY
    assert "width" in capsys.readouterr().err


def test_wsd_all_methods(files):
    code, out = run(
        "wsd", "--taxonomy", files["eat.tax"], "--observations", files["eat.tsv"],
        "--test", files["test.tsv"], "--sense-freqs", files["freqs.tsv"],
        "--all-methods", "--seed", "1",
    )
    assert code == 0
    assert "ordering bbn-balanced >= bbn-unbalanced >= random:" in out
    for m in ("random", "hmm", "resnik", "bbn-unbalanced", "bbn-balanced", "first-sense"):
        assert f"\n{m} " in out


def test_wsd_usage_errors(files):
    base = ["wsd", "--taxonomy", files["eat.tax"], "--observations", files["eat.tsv"]]
    assert run(*base)[0] == EXIT_USAGE
    assert run(*base, "--test", files["test.tsv"], "--method", "random")[0] == EXIT_USAGE
    assert run(*base, "--test", files["test.tsv"], "--method", "first-sense")[0] == EXIT_USAGE
    assert run(*base, "--test", files["test.tsv"], "--samples", "10")[0] == EXIT_USAGE


def test_missing_file_is_data_error(files, tmp_path):
    code, _ = run("validate", "--taxonomy", str(tmp_path / "nope.tax"))
    assert code == EXIT_DATA


def test_bad_flag_is_usage_error():
    assert run("rank", "--likely", "abc")[0] == EXIT_USAGE
    assert run("frobnicate")[0] == EXIT_USAGE


def test_bad_params_are_data_error(files):
    code, _ = run(
        "rank", "--taxonomy", files["eat.tax"], "--observations", files["eat.tsv"],
        "--predicate", "eat", "--likely", "0.1", "--unlikely", "0.2",
    )
    assert code == EXIT_DATA


def test_dump_network(files):
    code, out = run(
        "dump-network", "--taxonomy", files["drink.tax"], "--observations", files["drink.tsv"],
        "--predicate", "drink", "--balance",
    )
    assert code == 0
    assert out.startswith("# balanced target=0.1")
    assert "node java word leak=0.1 parents=BEVERAGE,ISLAND" in out


def test_config_file_precedence(files, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        f"taxonomy = {files['eat.tax']}\nobservations={files['eat.tsv']}\n"
        "predicate=eat\nlikely=0.99\nunlikely=0.01  # sharper\n"
    )
    code, out = run("rank", "--config", str(cfg))
    assert code == 0 and "likely=0.99" in out
    code, out = run("rank", "--config", str(cfg), "--likely", "0.95")
    assert code == 0 and "likely=0.95" in out
    cfg.write_text("nonsense=1\n")
    assert run("rank", "--config", str(cfg))[0] == EXIT_USAGE


def test_synth_then_wsd(tmp_path):
    out_dir = tmp_path / "bench"
    assert run("synth", "--out-dir", str(out_dir), "--predicates", "6")[0] == EXIT_USAGE
    code, _ = run("synth", "--out-dir", str(out_dir), "--predicates", "6", "--seed", "3")
    assert code == 0
    code, out = run(
        "wsd", "--taxonomy", str(out_dir / "taxonomy.txt"),
        "--observations", str(out_dir / "observations.tsv"),
        "--test", str(out_dir / "test.tsv"), "--sense-freqs", str(out_dir / "sense_freqs.tsv"),
        "--all-methods", "--seed", "3",
    )
    assert code == 0 and "first-sense" in out
