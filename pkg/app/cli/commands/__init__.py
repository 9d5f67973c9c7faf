"""Um módulo por subcomando; cada um expõe `register(subparsers)`."""
