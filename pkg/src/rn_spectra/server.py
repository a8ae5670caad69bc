"""
MCP Server for rn-spectra - generalized spectra and Radon-Nikodym
interpolation of sampled signals.
"""

import asyncio
import json
import logging
import math
import sys
from pathlib import Path
from typing import Any, Optional

from mcp.server import Server
from mcp.server.stdio import stdio_server
from mcp.types import TextContent, Tool

from .analysis import RunConfig, SpectralAnalyzer
from .config_loader import get_config
from .datafile import write_timeserie
from .models import MODEL_DEFAULTS, MODELS, RUNGE_COUNT, default_step, gen_runge, generate
from .moments import DXMode, OperatorLabel
from .orthopoly import BasisFamily
from .spectral import spectrum_summary

logger = logging.getLogger(__name__)

# Initialize the MCP server
server = Server("rn-spectra")

# Global analyzer instance
_analyzer: Optional[SpectralAnalyzer] = None


def get_analyzer() -> SpectralAnalyzer:
    """Get or create the analyzer instance."""
    global _analyzer
    if _analyzer is None:
        _analyzer = SpectralAnalyzer.from_config(get_config())
    return _analyzer


def _json_list(values) -> list:
    """Floats with NaN/inf replaced by None."""
    return [float(v) if math.isfinite(v) else None for v in values]


def _json_value(value: float) -> Optional[float]:
    value = float(value)
    return value if math.isfinite(value) else None


def _text(payload: Any) -> list[TextContent]:
    return [TextContent(type="text", text=json.dumps(payload, ensure_ascii=False, indent=2))]


def _error(message: str, error_type: str = "InputError") -> list[TextContent]:
    return _text({"error": message, "error_type": error_type})


_FILE_PROPERTIES = {
    "file_path": {
        "type": "string",
        "description": "Absolute path to a tab-separated x, f file ('|' lines are comments)",
    },
    "n": {"type": "integer", "description": "Basis dimension, 1..150 (default from config: 50)"},
    "dx": {
        "type": "string",
        "enum": [mode.value for mode in DXMode],
        "description": "<Q_k> from sample sums (default) or closed-form integrals",
    },
    "basis": {
        "type": "string",
        "enum": [family.value for family in BasisFamily],
        "description": "Polynomial basis (default: chebyshev)",
    },
}


@server.list_tools()
async def list_tools() -> list[Tool]:
    """List available tools for the MCP server."""
    return [
        Tool(
            name="analyze_timeserie",
            description="""Run the full analysis of a timeserie file and write the data files.

Writes RN_interpolated.dat, EV_RN_interpolated.dat and the spectra of the
value, derivative, derivative-by-parts and relaxation-rate pairs. Returns
the paths and per-spectrum min/max/spread.""",
            inputSchema={
                "type": "object",
                "properties": {
                    **_FILE_PROPERTIES,
                    "output_dir": {
                        "type": "string",
                        "description": "Output directory (default: a run directory in the cache)",
                    },
                },
                "required": ["file_path"],
            },
        ),
        Tool(
            name="compute_spectrum",
            description="""Generalized eigenvalues of one operator pair with Lebesgue weights and x estimates.

NaN eigenvalues (right matrix not positive definite) are returned as null.""",
            inputSchema={
                "type": "object",
                "properties": {
                    **_FILE_PROPERTIES,
                    "pair": {
                        "type": "string",
                        "enum": [label.value for label in OperatorLabel],
                        "description": "Operator pair (default: derivative)",
                    },
                },
                "required": ["file_path"],
            },
        ),
        Tool(
            name="gauss_quadrature_from_file",
            description="n-point Gauss quadrature nodes and weights of the sample measure of a file.",
            inputSchema={
                "type": "object",
                "properties": _FILE_PROPERTIES,
                "required": ["file_path", "n"],
            },
        ),
        Tool(
            name="generate_fixture",
            description="Write a synthetic fixture file (two-stage, multi-exp or runge).",
            inputSchema={
                "type": "object",
                "properties": {
                    "model": {"type": "string", "enum": MODELS},
                    "output_path": {"type": "string"},
                    "rates": {"type": "array", "items": {"type": "number"}},
                    "lengths": {"type": "array", "items": {"type": "number"}},
                    "step": {"type": "number"},
                    "count": {
                        "type": "integer",
                        "description": f"Runge sample count (default {RUNGE_COUNT})",
                    },
                },
                "required": ["model", "output_path"],
            },
        ),
        Tool(
            name="list_analyses",
            description="List cached analysis run directories.",
            inputSchema={"type": "object", "properties": {}},
        ),
        Tool(
            name="clear_analyses",
            description="Remove every cached analysis run directory.",
            inputSchema={"type": "object", "properties": {}},
        ),
        Tool(
            name="get_supported_options",
            description="Bases, dx modes, operator pairs and fixture models.",
            inputSchema={"type": "object", "properties": {}},
        ),
    ]


def _handle_analyze(analyzer: SpectralAnalyzer, arguments: dict) -> dict:
    cfg = RunConfig.from_config(
        arguments["file_path"],
        get_config(),
        n=arguments.get("n"),
        dx_mode=arguments.get("dx"),
        basis=arguments.get("basis"),
        output_dir=arguments.get("output_dir"),
    )
    result = analyzer.analyze(cfg)
    spectra = {}
    for label, spectrum in result.spectra.items():
        summary = spectrum_summary(spectrum, result.quadratures[label].weights)
        spectra[label.value] = {
            "min": _json_value(summary.minimum),
            "max": _json_value(summary.maximum),
            "spread": _json_value(summary.spread),
            "weighted_mean": _json_value(summary.weighted_mean),
            "defective": spectrum.defective,
        }
    return {
        "status": "success",
        "output_dir": str(result.output_dir),
        "files": {name: str(path) for name, path in result.files.items()},
        "spectra": spectra,
        "dual_form_difference": _json_value(result.dual_form_difference),
        "byparts_discrepancy": _json_value(result.byparts_discrepancy),
    }


def _handle_compute_spectrum(analyzer: SpectralAnalyzer, arguments: dict) -> dict:
    defaults = get_config().get_analysis_defaults()
    label = OperatorLabel(arguments.get("pair", OperatorLabel.DERIVATIVE.value))
    spectrum, quadrature = analyzer.compute_spectrum(
        arguments["file_path"],
        label,
        arguments.get("n", defaults["n"]),
        arguments.get("dx", defaults["dx_mode"]),
        arguments.get("basis", defaults["basis"]),
    )
    return {
        "pair": label.value,
        "n": spectrum.n,
        "defective": spectrum.defective,
        "eigenvalues": _json_list(spectrum.lambdas),
        "weights": _json_list(quadrature.weights),
        "x_estimates": _json_list(quadrature.x_estimates),
    }


def _handle_gauss(analyzer: SpectralAnalyzer, arguments: dict) -> dict:
    defaults = get_config().get_analysis_defaults()
    quadrature = analyzer.gauss_quadrature(
        arguments["file_path"],
        arguments["n"],
        arguments.get("dx", defaults["dx_mode"]),
        arguments.get("basis", defaults["basis"]),
    )
    return {
        "nodes": _json_list(quadrature.nodes),
        "weights": _json_list(quadrature.weights),
        "total_weight": _json_value(sum(quadrature.weights)),
    }


def _handle_generate(arguments: dict) -> dict:
    model = arguments["model"]
    output_path = Path(arguments["output_path"])
    if model == "runge":
        ts = gen_runge(int(arguments.get("count", RUNGE_COUNT)))
    elif model in MODEL_DEFAULTS:
        rates, lengths = MODEL_DEFAULTS[model]
        rates = arguments.get("rates") or rates
        lengths = arguments.get("lengths") or lengths
        step = arguments.get("step") or default_step(lengths)
        ts = generate(model, rates, lengths, step)
    else:
        raise ValueError(f"Unknown model '{model}'. Supported: {', '.join(MODELS)}")
    write_timeserie(output_path, ts, f"rn-spectra generate_fixture model={model}")
    return {"status": "success", "output_path": str(output_path), "samples": len(ts)}


@server.call_tool()
async def call_tool(name: str, arguments: dict[str, Any]) -> list[TextContent]:
    """Handle tool calls."""
    arguments = arguments or {}
    try:
        analyzer = get_analyzer()

        if name in ("analyze_timeserie", "compute_spectrum", "gauss_quadrature_from_file"):
            if not arguments.get("file_path"):
                return _error("file_path is required")
            if name == "analyze_timeserie":
                return _text(_handle_analyze(analyzer, arguments))
            if name == "compute_spectrum":
                return _text(_handle_compute_spectrum(analyzer, arguments))
            if "n" not in arguments:
                return _error("n is required")
            return _text(_handle_gauss(analyzer, arguments))

        elif name == "generate_fixture":
            if not arguments.get("model") or not arguments.get("output_path"):
                return _error("model and output_path are required")
            return _text(_handle_generate(arguments))

        elif name == "list_analyses":
            return _text(analyzer.get_cache_info())

        elif name == "clear_analyses":
            result = analyzer.clear_cache()
            return _text({
                "status": "success",
                "cache_location": str(analyzer.cache_dir),
                "cleared_count": result["count"],
                "cleared_directories": result["cleared"],
            })

        elif name == "get_supported_options":
            return _text({
                "bases": [family.value for family in BasisFamily],
                "dx_modes": [mode.value for mode in DXMode],
                "pairs": [label.value for label in OperatorLabel],
                "models": MODELS,
            })

        else:
            return _error(f"Unknown tool: {name}", "UnknownTool")

    except Exception as e:
        logger.warning("Tool %s failed: %s: %s", name, type(e).__name__, e)
        return _error(str(e), type(e).__name__)


def main():
    """Main entry point for the MCP server."""
    logging.basicConfig(
        level=getattr(logging, get_config().get_log_level(), logging.WARNING),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )

    async def run():
        async with stdio_server() as (read_stream, write_stream):
            await server.run(
                read_stream,
                write_stream,
                server.create_initialization_options(),
            )

    asyncio.run(run())


if __name__ == "__main__":
    main()
