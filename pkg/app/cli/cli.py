import argparse

from app.cli.commands import converge, decompose, encode, linearize, probe, synthesize, termcount, verify
from app.core.config import settings

COMMANDS = (linearize, converge, decompose, termcount, synthesize, encode, verify, probe)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="carleman",
        description=f"{settings.PROJECT_NAME}: linearização de Carleman, decomposição Sigma/Pauli e block encoding.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {settings.VERSION}")
    parser.add_argument("--log-level", default=settings.LOG_LEVEL, help="Nível de log (stderr)")
    parser.add_argument("--log-json", action="store_true", default=settings.LOG_JSON, help="Logs em JSON")

    subparsers = parser.add_subparsers(dest="command", title="subcomandos")
    subparsers.required = True
    for command in COMMANDS:
        command.register(subparsers)
    return parser
