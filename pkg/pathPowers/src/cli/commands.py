# src/cli/commands.py
import argparse
import json
from pathlib import Path
from typing import Any, Callable, Dict, List, Literal, Optional, Sequence

import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from embedding.power_path import EmbedMode, EmbedParams, embed_power_path, guaranteed_length_bound
from embedding.square_path import embed_square_path, hamilton_path
from extremal.avoider import (
    AvoiderCertificate,
    certify_upper_bound,
    reverify_certificate,
    search_avoider,
    triangle_certificate,
)
from extremal.bounds import (
    asymptotic_regime,
    asymptotic_upper_bound,
    avoider_path_size,
    square_path_formula,
    union_bound,
    upper_bound_formula,
)
from extremal.ell import ell_exact, ell_exact_search
from extremal.oracle import longest_power_path
from tournament.constructions import compose_chain
from tournament.graph import Model, Tournament, as_explicit, generate
from tournament.serialization import read_tournament, serialize, write_tournament
from tournament.witness import PowerPathWitness
from utils.config import Settings, load_config
from utils.errors import InvalidVertexError, PathPowerError, UsageError, VerificationError
from utils.logger import get_logger, set_log_level

logger = get_logger(__name__)


class RunConfig(BaseModel):
    """Validated view of one command line; unknown keys are rejected."""
    command: str
    input: Optional[str] = None
    inputs: List[str] = Field(default_factory=list)
    output: Optional[str] = None
    witness: Optional[str] = None
    cert: Optional[str] = None
    trace_out: Optional[str] = None
    model: Optional[Model] = None
    n: Optional[int] = Field(None, ge=1)
    k: Optional[int] = Field(None, ge=1)
    m: Optional[int] = Field(None, ge=2)
    seed: int = 0
    embed_mode: Optional[Literal["hamilton", "square", "power"]] = None
    t: Optional[int] = Field(None, ge=1)
    a_star: Optional[int] = Field(None, ge=1)
    blocks: Optional[int] = Field(None, ge=1)
    guaranteed: bool = False
    stop_at: Optional[int] = Field(None, ge=1)
    trials: Optional[int] = Field(None, ge=1)
    shards: int = Field(1, ge=1)
    shard_index: int = Field(0, ge=0)
    long_run: bool = False
    nmax: Optional[int] = Field(None, ge=1)
    format: Literal["text", "json"] = "text"
    verbose: int = 0
    quiet: bool = False

    model_config = ConfigDict(extra="forbid", frozen=True)

    @model_validator(mode="after")
    def _check_consistency(self) -> 'RunConfig':
        if self.shard_index >= self.shards:
            raise ValueError(f"shard index {self.shard_index} must be below shards={self.shards}")
        if self.t is not None and self.a_star is not None and self.a_star > self.t:
            raise ValueError(f"a_star ({self.a_star}) must not exceed t ({self.t})")
        return self


# --- Output ---

def _emit(cfg: RunConfig, records: List[Dict[str, Any]]) -> None:
    """JSON lines, or one aligned table, on stdout."""
    if cfg.format == "json":
        for record in records:
            print(json.dumps(record, separators=(",", ":")))
        return
    rows = [
        {key: _cell(value) for key, value in record.items()}
        for record in records
    ]
    print(pd.DataFrame(rows).to_string(index=False))


def _cell(value: Any) -> Any:
    if value is None:
        return "-"
    if isinstance(value, (list, tuple)):
        return " ".join(str(v) for v in value)
    return value


def _load_tournament(cfg: RunConfig) -> Tournament:
    if cfg.input:
        return read_tournament(cfg.input)
    if cfg.model is not None and cfg.n is not None:
        return generate(cfg.model.value, cfg.n, cfg.seed)
    raise UsageError("pass --in FILE, or --model and --n to generate the tournament")


def _require(cfg: RunConfig, *names: str) -> None:
    missing = [f"--{name.replace('_', '-')}" for name in names if getattr(cfg, name) is None]
    if missing:
        raise UsageError(f"'{cfg.command}' needs {', '.join(missing)}")


# --- Subcommands ---

def cmd_gen(cfg: RunConfig, config: Settings) -> int:
    _require(cfg, "model", "n")
    tournament = as_explicit(generate(cfg.model.value, cfg.n, cfg.seed))
    if cfg.output is None:
        print(serialize(tournament), end="")
        return 0
    write_tournament(tournament, cfg.output)
    logger.info(f"Wrote {cfg.model.value} tournament on {cfg.n} vertices to {cfg.output}.")
    _emit(cfg, [{"model": cfg.model.value, "n": cfg.n, "seed": cfg.seed, "out": cfg.output}])
    return 0


def cmd_embed(cfg: RunConfig, config: Settings) -> int:
    mode = cfg.embed_mode
    power_only = [flag for flag, value in
                  (("--t", cfg.t), ("--a-star", cfg.a_star), ("--blocks", cfg.blocks), ("--trace-out", cfg.trace_out))
                  if value is not None]
    if mode != "power" and (power_only or cfg.guaranteed):
        raise UsageError(f"{', '.join(power_only) or '--mode-guaranteed'} only applies to --mode power")
    fixed_k = {"hamilton": 1, "square": 2}.get(mode)
    if fixed_k is not None and cfg.k not in (None, fixed_k):
        raise UsageError(f"--mode {mode} embeds k={fixed_k}, got --k {cfg.k}")

    tournament = _load_tournament(cfg)
    trace = None
    if mode == "hamilton":
        witness = hamilton_path(tournament, config)
    elif mode == "square":
        witness = embed_square_path(tournament, config)
    else:
        params = EmbedParams(k=cfg.k or 2, t=cfg.t, a_star=cfg.a_star, blocks=cfg.blocks)
        run_mode = EmbedMode.GUARANTEED if cfg.guaranteed else EmbedMode.HEURISTIC
        witness, trace = embed_power_path(tournament, params, mode=run_mode, config=config)

    if not witness.verify(tournament):
        raise VerificationError(f"{mode} witness failed verification; nothing printed")
    if trace is not None and cfg.trace_out:
        Path(cfg.trace_out).write_text("\n".join(trace.to_lines()) + "\n")
    if cfg.output:
        Path(cfg.output).write_text(witness.to_line() + "\n")
    _emit(cfg, [{
        "mode": mode,
        "n": tournament.n,
        "k": witness.k,
        "length": len(witness),
        "partial": witness.partial,
        "vertices": witness.vertices,
    }])
    return 0


def cmd_oracle(cfg: RunConfig, config: Settings) -> int:
    _require(cfg, "k")
    tournament = _load_tournament(cfg)
    result = longest_power_path(tournament, cfg.k, stop_at=cfg.stop_at, config=config)
    if cfg.output:
        Path(cfg.output).write_text(PowerPathWitness(k=cfg.k, vertices=result.witness).to_line() + "\n")
    _emit(cfg, [{
        "n": tournament.n,
        "k": cfg.k,
        "max_vertices": result.max_vertices,
        "nodes": result.nodes_explored,
        "witness": result.witness,
    }])
    return 0


def cmd_ell_exact(cfg: RunConfig, config: Settings) -> int:
    _require(cfg, "n", "k")
    result = ell_exact_search(
        cfg.n, cfg.k, long_run=cfg.long_run, shards=cfg.shards, shard_index=cfg.shard_index, config=config,
    )
    if cfg.output and result.extremal_index >= 0:
        write_tournament(result.extremal_tournament(), cfg.output)
    _emit(cfg, [{
        "n": result.n,
        "k": result.k,
        "value": result.value,
        "enumerated": result.enumerated,
        "extremal_index": result.extremal_index,
        "shard": f"{cfg.shard_index}/{cfg.shards}",
    }])
    return 0


def cmd_search_avoider(cfg: RunConfig, config: Settings) -> int:
    _require(cfg, "k")
    m = cfg.m if cfg.m is not None else avoider_path_size(cfg.k)
    result = search_avoider(
        cfg.k, m, trials=cfg.trials, seed=cfg.seed,
        shards=cfg.shards, shard_index=cfg.shard_index, config=config,
    )
    if result.found and cfg.output:
        Path(cfg.output).write_text(result.certificate.to_text())
    _emit(cfg, [{
        "k": cfg.k,
        "m": m,
        "found": result.found,
        "trials": result.trials,
        "shortest_seen": result.shortest_seen,
        "sample_seed": result.certificate.seed if result.found else None,
    }])
    # An exhausted budget is a reported outcome, not a refutation.
    return 0 if result.found else 1


def cmd_compose(cfg: RunConfig, config: Settings) -> int:
    if len(cfg.inputs) < 2:
        raise UsageError("compose needs at least two tournament files")
    blocks = [read_tournament(path) for path in cfg.inputs]
    composed = compose_chain(blocks)
    if cfg.output is None:
        print(serialize(composed), end="")
        return 0
    write_tournament(composed, cfg.output)
    _emit(cfg, [{"n": composed.n, "blocks": [b.n for b in blocks], "out": cfg.output}])
    return 0


def cmd_verify(cfg: RunConfig, config: Settings) -> int:
    if cfg.cert:
        cert = AvoiderCertificate.from_text(Path(cfg.cert).read_text())
        if cfg.k is not None and cfg.k != cert.k:
            raise UsageError(f"certificate is for k={cert.k}, got --k {cfg.k}")
        value = longest_power_path(cert.tournament, cert.k, stop_at=cert.m, config=config).max_vertices
        ok = value < cert.m and reverify_certificate(cert, seed=cfg.seed or 1, config=config)
        _emit(cfg, [{"k": cert.k, "m": cert.m, "n": cert.tournament.n, "verified": ok}])
        if not ok:
            raise VerificationError(f"tournament contains a {cert.k}-th power path on {cert.m} vertices")
        return 0

    if not cfg.witness:
        raise UsageError("verify needs --witness FILE (with --in) or --cert FILE")
    tournament = _load_tournament(cfg)
    witness = PowerPathWitness.from_line(Path(cfg.witness).read_text())
    if cfg.k is not None and cfg.k != witness.k:
        witness = witness.model_copy(update={"k": cfg.k})
    try:
        ok = witness.verify(tournament)
    except InvalidVertexError as e:
        logger.warning(f"Witness names a vertex outside the tournament: {e}")
        ok = False
    _emit(cfg, [{"k": witness.k, "mode": witness.mode.value, "length": len(witness), "verified": ok}])
    if not ok:
        raise VerificationError(f"witness does not carry the {witness.k}-th power of a path")
    return 0


def table_rows(k: int, n_max: int, long_run: bool = False, config: Optional[Settings] = None) -> List[Dict[str, Any]]:
    """Exhaustive ell_k(n) for n = 1..n_max next to the closed form ceil(2n/3)."""
    if k != 2:
        raise UsageError(f"only k=2 has a closed form to compare against, got k={k}")
    rows = []
    for n in range(1, n_max + 1):
        value = ell_exact(n, k, long_run=long_run, config=config)
        formula = square_path_formula(n)
        rows.append({"n": n, "ell_exact": value, "formula": formula,
                     "status": "MATCH" if value == formula else "MISMATCH"})
    return rows


def reproduce_table(k: int, n_max: int, long_run: bool = False, config: Optional[Settings] = None) -> str:
    return pd.DataFrame(table_rows(k, n_max, long_run=long_run, config=config)).to_string(index=False)


def cmd_table(cfg: RunConfig, config: Settings) -> int:
    _require(cfg, "nmax")
    rows = table_rows(cfg.k or 2, cfg.nmax, long_run=cfg.long_run, config=config)
    _emit(cfg, rows)
    mismatches = sum(row["status"] != "MATCH" for row in rows)
    if mismatches:
        raise VerificationError(f"{mismatches} row(s) disagree with ceil(2n/3)")
    return 0


def cmd_bounds(cfg: RunConfig, config: Settings) -> int:
    _require(cfg, "k", "n")
    k, n = cfg.k, cfg.n
    records = [
        {"quantity": "lower_length_bound", "value": guaranteed_length_bound(n, k)},
        {"quantity": "upper_bound", "value": upper_bound_formula(k, n)},
        {"quantity": "asymptotic_upper_bound", "value": asymptotic_upper_bound(k, n)},
        {"quantity": "asymptotic_regime", "value": asymptotic_regime(k, n)},
        {"quantity": "union_bound", "value": union_bound(k)},
    ]
    if k == 2:
        records.insert(0, {"quantity": "square_path_formula", "value": square_path_formula(n)})
    _emit(cfg, records)
    return 0


def cmd_certify(cfg: RunConfig, config: Settings) -> int:
    _require(cfg, "k", "n")
    if cfg.cert:
        block = AvoiderCertificate.from_text(Path(cfg.cert).read_text())
    elif cfg.k == 2:
        block = triangle_certificate()
    else:
        raise UsageError(f"k={cfg.k} needs an avoider block: pass --cert FILE")
    result = certify_upper_bound(cfg.k, cfg.n, block, config=config)
    if cfg.output:
        write_tournament(result.tournament, cfg.output)
    _emit(cfg, [{
        "k": result.k,
        "n": result.tournament.n,
        "bound": result.bound,
        "blocks": result.block_sizes,
        "oracle": result.oracle_value,
    }])
    return 0


COMMANDS: Dict[str, Callable[[RunConfig, Settings], int]] = {
    "gen": cmd_gen,
    "embed": cmd_embed,
    "oracle": cmd_oracle,
    "ell-exact": cmd_ell_exact,
    "search-avoider": cmd_search_avoider,
    "compose": cmd_compose,
    "verify": cmd_verify,
    "table": cmd_table,
    "bounds": cmd_bounds,
    "certify": cmd_certify,
}


# --- Parser ---

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["text", "json"], default="text",
                        help="aligned columns or JSON lines on stdout")
    common.add_argument("-v", "--verbose", action="count", default=0, help="debug logging")
    common.add_argument("-q", "--quiet", action="store_true", help="errors only")

    source = argparse.ArgumentParser(add_help=False)
    source.add_argument("--in", dest="input", help="PTv1 tournament file")
    source.add_argument("--model", choices=[m.value for m in Model], help="generate instead of reading")
    source.add_argument("--n", type=int, help="vertex count for --model")
    source.add_argument("--seed", type=int, default=0)

    shard = argparse.ArgumentParser(add_help=False)
    shard.add_argument("--shards", type=int, default=1)
    shard.add_argument("--shard-index", type=int, default=0)

    parser = argparse.ArgumentParser(
        prog="pathpowers",
        description="Powers of directed paths in tournaments: embeddings, oracles and extremal certificates.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", parents=[common], help="generate a tournament")
    p.add_argument("--model", required=True, choices=[m.value for m in Model])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", dest="output")

    p = sub.add_parser("embed", parents=[common, source], help="embed a Hamilton, square or k-th power path")
    p.add_argument("--mode", dest="embed_mode", required=True, choices=["hamilton", "square", "power"])
    p.add_argument("--k", type=int)
    p.add_argument("--t", type=int)
    p.add_argument("--a-star", type=int)
    p.add_argument("--blocks", type=int)
    p.add_argument("--mode-guaranteed", dest="guaranteed", action="store_true",
                   help="fail instead of returning a partial witness")
    p.add_argument("--trace-out", help="write the per-step trace as JSON lines")
    p.add_argument("--out", dest="output", help="write the witness line")

    p = sub.add_parser("oracle", parents=[common, source], help="exact longest k-th power path")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--stop-at", type=int)
    p.add_argument("--out", dest="output", help="write the witness line")

    p = sub.add_parser("ell-exact", parents=[common, shard], help="exhaustive ell_k(n)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--long-run", action="store_true")
    p.add_argument("--out", dest="output", help="write one extremal tournament")

    p = sub.add_parser("search-avoider", parents=[common, shard], help="random search for an avoider block")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--m", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", dest="output", help="write the certificate")

    p = sub.add_parser("compose", parents=[common], help="chain tournaments, earlier beating later")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--out", dest="output")

    p = sub.add_parser("verify", parents=[common], help="check a witness or an avoider certificate")
    p.add_argument("--in", dest="input")
    p.add_argument("--k", type=int)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--witness")
    group.add_argument("--cert")
    p.add_argument("--seed", type=int, default=1, help="relabeling seed for certificates")

    p = sub.add_parser("table", parents=[common], help="ell_2(n) against ceil(2n/3)")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--nmax", type=int, required=True)
    p.add_argument("--long-run", action="store_true")

    p = sub.add_parser("bounds", parents=[common], help="closed-form bounds")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=int, required=True)

    p = sub.add_parser("certify", parents=[common], help="upper-bound certificate from avoider blocks")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--cert", help="avoider block certificate (default for k=2: the cyclic triangle)")
    p.add_argument("--out", dest="output", help="write the composed tournament")

    return parser


def run(argv: Optional[Sequence[str]] = None) -> int:
    """
    Parses `argv`, runs one subcommand and returns the process exit status:
    0 on success, 2 for usage, parameter and parse errors, 3 when a cap is
    exceeded and 4 when a witness or certificate fails verification.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2

    try:
        cfg = RunConfig.model_validate(vars(args))
    except ValidationError as e:
        logger.error(f"❌ Invalid arguments: {e.errors()[0]['msg']}")
        return UsageError.exit_code

    if cfg.verbose:
        set_log_level("DEBUG")
    elif cfg.quiet:
        set_log_level("ERROR")

    try:
        config = load_config()
        return COMMANDS[cfg.command](cfg, config)
    except ValidationError as e:
        logger.error(f"❌ Invalid parameters: {e.errors()[0]['msg']}")
        return UsageError.exit_code
    except PathPowerError as e:
        logger.error(f"❌ {type(e).__name__}: {e}")
        return e.exit_code
    except OSError as e:
        logger.error(f"❌ {e}")
        return UsageError.exit_code
