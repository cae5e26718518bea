#!/usr/bin/env python3

'''
Command-line interface: one subcommand per computation, results on stdout
(or --output) as a table or a JSON record, both carrying the run config.

    tree-dimension dim --group odometer --depth 8
    tree-dimension lift --group grigorchuk --depth 6 --level 1
    tree-dimension matcheck --file v2_block.rep --format record
'''

import argparse
import csv
from dataclasses import dataclass, field
import io
import json
import logging
import os
from pathlib import Path
import sys
from typing import (
    Any,
    Dict,
    List,
    Mapping,
    Optional,
    Sequence,
)

from .automaton_utils import (
    CATALOG_NAMES,
    TreeGroup,
    catalog,
    describe,
    load_automaton,
)
from .config_utils import COMMANDS, RunConfig, RunStats
from .dimension_utils import (
    decay_certificate,
    dimension_profile,
    level_index_sweep,
    trivial_rist_projection_bound,
)
from .errors import (
    FormatError,
    InapplicableError,
    PreconditionError,
    exit_code_for,
)
from .group_utils import (
    center_level_profile,
    law_holds,
    projection_branch_level,
    rigid_level_stabilizer,
    rigid_stabilizer,
    weakly_branch_evidence,
)
from .lifting_utils import tree_lifting
from .matrix_utils import (
    assert_sqrt_bound,
    choose_primes,
    exhaustive_max_vn,
    format_matrix,
    independence_rank,
    modular_rank,
    verify_pattern,
)
from .ncrep_utils import (
    Graph,
    construct_vn_via_lifting,
    construct_vn_weakly_branch,
    dump_ncrep,
    load_ncrep,
)
from .perm_utils import format_perm
from .tree_utils import format_vertex, parse_vertex

LOGGER = logging.getLogger(__name__)
LOGGER.setLevel(os.getenv('LOG_LEVEL', 'INFO'))


@dataclass
class CommandResult:
    '''
    Output of one subcommand.

    Args:
    - rows: table rows, all with the same keys
    - summary: scalar results echoed above the table
    - body: free text replacing the CSV table (representation files)
    '''
    rows: List[Mapping[str, Any]] = field(default_factory=list)
    summary: Mapping[str, Any] = field(default_factory=dict)
    body: Optional[str] = None


def load_group(config: RunConfig, depth: int) -> TreeGroup:
    '''
    Unfolds the configured catalog group or automaton file to the given
    depth, after checking the depth against the configured maximum.
    '''
    if config.group:
        definition = catalog(config.group, config.branching, max_depth=depth)
    else:
        definition = load_automaton(config.automaton)
    config.check_depth(definition.shape(depth).degrees, depth)
    G = definition.unfold(depth)
    LOGGER.info('Unfolded %s', describe(G))
    return G


def run_dim(config: RunConfig) -> CommandResult:
    profile = dimension_profile(load_group(config, config.depth), config.depth)
    record = profile.to_record()
    return CommandResult(
        rows=record['records'],
        summary={
            'window_levels': ' '.join(str(n) for n in record['window']['levels']),
            'window_min': record['window']['min'],
            'window_max': record['window']['max'],
            'last': record['window']['last'],
        },
    )


def run_rist(config: RunConfig) -> CommandResult:
    G = load_group(config, config.depth)
    if config.vertex:
        rists = [rigid_stabilizer(G, parse_vertex(config.vertex))]
    else:
        rists = rigid_level_stabilizer(G, config.level)
    return CommandResult(rows=[{
        'vertex': format_vertex(r.vertex),
        'order': r.order(),
        'trivial': r.is_trivial(),
        'generators': ' '.join(format_perm(g) for g in r.leaf_generators),
    } for r in rists])


def run_evidence(config: RunConfig) -> CommandResult:
    G = load_group(config, config.depth)
    report = weakly_branch_evidence(G, config.n_max, config.margin)
    return CommandResult(
        rows=[_flatten(r.to_record()) for r in report.records],
        summary={'verdict': report.verdict},
    )


def run_ineq(config: RunConfig) -> CommandResult:
    '''
    The level-index inequality for every k, n >= 1 with k + n <= depth; with
    --vertex also the trivial-Rist projection bounds below that vertex and
    the decay chain along it.
    '''
    G = load_group(config, config.depth)
    checks = level_index_sweep(G)
    summary = {'holds': all(c.holds for c in checks)}

    if config.vertex:
        v = parse_vertex(config.vertex)
        for n in range(1, G.depth - len(v)):
            try:
                checks.append(trivial_rist_projection_bound(G, v, n))
            except InapplicableError as e:
                LOGGER.info('Skipping the projection bound: %s', e)
                break
        if len(v) + 1 <= G.depth:
            certificate = decay_certificate(G, v, len(v))
            summary.update({
                'decay_holds': certificate.holds,
                'decay_product': str(certificate.product),
                'r_root': str(certificate.r_root),
                'r_end': str(certificate.r_end),
            })
        summary['holds'] = all(c.holds for c in checks)

    return CommandResult(
        rows=[{
            'check': c.name,
            'params': ' '.join(f'{k}={v}' for k, v in sorted(c.params.items())),
            'left': str(c.left),
            'right': str(c.right),
            'holds': c.holds,
        } for c in checks],
        summary=summary,
    )


def run_lift(config: RunConfig) -> CommandResult:
    witness = tree_lifting(load_group(config, config.depth), config.level)
    record = witness.to_record()
    return CommandResult(
        rows=record['lifts'],
        summary=_flatten({k: v for k, v in record.items() if k != 'lifts'}),
    )


def run_ncrep(config: RunConfig) -> CommandResult:
    G = load_group(config, config.depth)
    if config.method == 'lifting':
        if config.level is None:
            raise PreconditionError('ncrep --method lifting: --level is required')
        rep = construct_vn_via_lifting(
            G, config.n, config.level, config.search_bound)
    elif config.method == 'weakly_branch':
        rep = construct_vn_weakly_branch(G, config.n, config.search_bound)
    else:
        raise PreconditionError(f'Unknown method {config.method!r}')
    return CommandResult(summary=_flatten(rep.meta), body=dump_ncrep(rep))


def run_matcheck(config: RunConfig) -> CommandResult:
    '''
    Checks an ingested matrix labelling of V_n: pattern, independence rank
    of the a-side (cross-checked mod seeded primes over ZZ) and the bound.
    '''
    rep = load_ncrep(Path(config.file).read_text())
    if rep.target != 'matrix':
        raise FormatError(f'{config.file}: expected a matrix target')
    n = rep.graph.size // 2
    if rep.graph != Graph.vn(n):
        raise PreconditionError(f'{config.file}: the graph is not V_{n}')

    mats = rep.labels
    pattern = verify_pattern(mats)
    summary = {
        'n': n,
        'ring': mats[0].ring.tag if mats else '',
        'degree': mats[0].degree if mats else 0,
        'pattern_ok': pattern,
        'rank': independence_rank(mats[0::2]),
    }
    if mats and mats[0].ring.tag == 'ZZ':
        for p in choose_primes(config.seed):
            summary[f'rank_mod_{p}'] = modular_rank(mats[0::2], p)
    if pattern:
        summary['bound_ok'] = assert_sqrt_bound(mats)
    return CommandResult(
        rows=[{'vertex': i, 'matrix': format_matrix(M)}
              for i, M in enumerate(mats)],
        summary=summary,
    )


def run_maxvn(config: RunConfig) -> CommandResult:
    result = exhaustive_max_vn(config.prime, config.degree)
    return CommandResult(
        rows=[{'vertex': i, 'matrix': format_matrix(M)}
              for i, M in enumerate(result.witness)],
        summary={
            'order': result.order,
            'n': result.n,
            'within_bound': result.within_bound,
        },
    )


def run_center(config: RunConfig) -> CommandResult:
    G = load_group(config, config.depth)
    records = center_level_profile(G, config.n_max)
    return CommandResult(
        rows=[{'level': r.level, 'order': r.order} for r in records])


def run_law(config: RunConfig) -> CommandResult:
    G = load_group(config, config.depth)
    level = config.depth if config.level is None else config.level
    check = law_holds(G, config.word, level)
    summary = {'holds': check.holds}
    if check.counterexample:
        summary['counterexample'] = ' '.join(
            f'{x}={format_perm(p)}'
            for x, p in sorted(check.counterexample.items()))
    return CommandResult(summary=summary)


def run_branchscan(config: RunConfig) -> CommandResult:
    G = load_group(config, config.depth)
    level, reports = projection_branch_level(G, config.level, config.margin)
    rows = [
        dict(_flatten(r.to_record()), projection=report.label)
        for report in reports
        for r in report.records
    ]
    return CommandResult(
        rows=rows, summary={'branch_level': '' if level is None else level})


RUNNERS = {
    'dim': run_dim,
    'rist': run_rist,
    'evidence': run_evidence,
    'ineq': run_ineq,
    'lift': run_lift,
    'ncrep': run_ncrep,
    'matcheck': run_matcheck,
    'maxvn': run_maxvn,
    'center': run_center,
    'law': run_law,
    'branchscan': run_branchscan,
}
assert sorted(RUNNERS) == sorted(COMMANDS)


def _flatten(record: Mapping[str, Any]) -> Dict[str, Any]:
    return {
        k: ' '.join(str(x) for x in v) if isinstance(v, (list, tuple)) else v
        for k, v in record.items()
    }


def _text(value: Any) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    return '' if value is None else str(value)


def render(config: RunConfig, result: CommandResult) -> str:
    '''
    Table: `# key=value` lines for the config and the summary, then the CSV
    rows or the free-text body. Record: one JSON document with sorted keys.
    '''
    if config.format == 'record':
        document = {
            'config': config.echo(),
            'summary': dict(result.summary),
            'rows': list(result.rows),
        }
        if result.body is not None:
            document['body'] = result.body
        return json.dumps(document, indent=2, sort_keys=True, default=str) + '\n'

    lines = [
        f'# {k}={_text(v)}' for k, v in config.echo().items()
        if v is not None
    ]
    lines += [f'# {k}={_text(v)}' for k, v in result.summary.items()]
    out = io.StringIO()
    out.write('\n'.join(lines) + '\n')
    if result.body is not None:
        out.write(result.body + '\n')
    elif result.rows:
        writer = csv.DictWriter(
            out, fieldnames=list(result.rows[0]), lineterminator='\n')
        writer.writeheader()
        for row in result.rows:
            writer.writerow({k: _text(v) for k, v in row.items()})
    return out.getvalue()


def derive_depth(config: RunConfig):
    '''
    evidence and branchscan default their depth to the deepest level they
    read.
    '''
    if config.depth is not None:
        return
    if config.command == 'evidence':
        config.depth = config.n_max + config.margin
    elif config.command == 'branchscan':
        config.depth = config.level + config.margin


def run(config: RunConfig) -> int:
    '''
    Validates the config, runs its command and writes the output.

    Returns: the exit status
    '''
    stats = RunStats(config.command)
    try:
        config.validate()
        derive_depth(config)
        with stats.measure():
            result = RUNNERS[config.command](config)
        text = render(config, result)
        if config.output:
            Path(config.output).write_text(text)
        else:
            sys.stdout.write(text)
    except Exception as e:
        code = exit_code_for(e)
        if code == 1:
            LOGGER.exception('%s failed', config.command)
        else:
            LOGGER.error('%s: %s', type(e).__name__, e)
        return code

    LOGGER.info('%s finished in %.3fs', config.command, stats.time)
    return 0


def parse_args(argv: Sequence[str] = None):
    parser = argparse.ArgumentParser(
        prog='tree-dimension',
        description='Finite-depth computations on groups acting on rooted trees')
    subparsers = parser.add_subparsers(dest='command', required=True)

    for command in COMMANDS:
        sub = subparsers.add_parser(command, help=RUNNERS[command].__doc__)
        source = sub.add_argument_group('group source')
        source.add_argument('--group', choices=CATALOG_NAMES)
        source.add_argument('--automaton', help='automaton JSON file')
        source.add_argument('--branching', type=int,
                            help='degree for full, prime for sylow_p')
        sub.add_argument('--depth', type=int)
        sub.add_argument('--level', type=int)
        sub.add_argument('--n', type=int)
        sub.add_argument('--n-max', dest='n_max', type=int)
        sub.add_argument('--margin', type=int)
        sub.add_argument('--vertex', help='vertex digits, e.g. 01 or 10.2')
        sub.add_argument('--word', help='law word, e.g. [x,y]')
        sub.add_argument('--method', choices=['lifting', 'weakly_branch'])
        sub.add_argument('--file', help='matrix labelling file')
        sub.add_argument('--prime', type=int)
        sub.add_argument('--degree', type=int)
        sub.add_argument('--search-bound', dest='search_bound', type=int)
        sub.add_argument('--seed', type=int)
        sub.add_argument('--format', choices=['table', 'record'])
        sub.add_argument('--output', '-o')

    return parser.parse_args(argv)


def main(argv: Sequence[str] = None) -> int:
    logging.basicConfig(
        stream=sys.stderr,
        level=os.getenv('LOG_LEVEL', 'INFO'),
        format='%(asctime)s %(levelname)s %(name)s: %(message)s',
    )
    return run(RunConfig.from_args(parse_args(argv)))


if __name__ == '__main__':
    sys.exit(main())
