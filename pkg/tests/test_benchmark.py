import importlib.util
import os


def test_benchmark_smoke(capsys):
    path = os.path.join(os.path.dirname(__file__), "..", "benchmarks", "bench_kernels.py")
    spec = importlib.util.spec_from_file_location("bench_kernels", path)
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    mod.main(["--sizes", "20", "--repeat", "1", "--w0-points", "21"])
    out = capsys.readouterr().out
    assert "transport_simplex" in out
    assert "values agree: True" in out
