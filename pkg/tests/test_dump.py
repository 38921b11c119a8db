import json
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer

import pytest

from entropyrank import DumpRecord, PrecomputedLM, fetch_remote, load_dump, save_dump
from entropyrank.dump import format_float
from entropyrank.errors import (
    ParseError,
    RemoteNetworkError,
    RemoteSchemaError,
    RemoteStatusError,
    ValidationError,
)


def record(doc_id="d1", n=2):
    return DumpRecord(
        doc_id=doc_id,
        tokens=tuple(f"t{i}" for i in range(n)),
        char_spans=tuple((3 * i, 3 * i + 2) for i in range(n)),
        entropy_bits=tuple(1.5 + i for i in range(n)),
        logprob_bits=tuple(-0.5 - i for i in range(n)),
    )


class TestDumpRecord:
    def test_minimal_record(self):
        r = DumpRecord(
            doc_id="one",
            tokens=("hello",),
            char_spans=((0, 5),),
            entropy_bits=(2.0,),
            logprob_bits=(0.0,),
        )
        assert r.tokens == ("hello",)

    def test_short_entropy_array_rejected(self):
        with pytest.raises(ValidationError, match="entropy_bits"):
            DumpRecord(
                doc_id="d",
                tokens=("a", "b"),
                char_spans=((0, 1), (2, 3)),
                entropy_bits=(1.0,),
                logprob_bits=(-1.0, -1.0),
            )

    def test_overlapping_spans_rejected(self):
        with pytest.raises(ValidationError, match="char_spans"):
            DumpRecord(
                doc_id="d",
                tokens=("a", "b"),
                char_spans=((0, 3), (2, 4)),
                entropy_bits=(1.0, 1.0),
                logprob_bits=(-1.0, -1.0),
            )

    def test_empty_span_rejected(self):
        with pytest.raises(ValidationError, match="char_spans"):
            DumpRecord(
                doc_id="d",
                tokens=("a",),
                char_spans=((2, 2),),
                entropy_bits=(1.0,),
                logprob_bits=(-1.0,),
            )

    def test_negative_entropy_rejected(self):
        with pytest.raises(ValidationError, match="entropy_bits"):
            DumpRecord(
                doc_id="d",
                tokens=("a",),
                char_spans=((0, 1),),
                entropy_bits=(-0.1,),
                logprob_bits=(-1.0,),
            )

    def test_positive_logprob_rejected(self):
        with pytest.raises(ValidationError, match="logprob_bits"):
            DumpRecord(
                doc_id="d",
                tokens=("a",),
                char_spans=((0, 1),),
                entropy_bits=(1.0,),
                logprob_bits=(0.25,),
            )


class TestDumpFile:
    def test_load_save_round_trip_is_byte_identical(self, tmp_path):
        path = tmp_path / "dump.jsonl"
        save_dump([record("a"), record("b", n=3)], path)
        first = path.read_bytes()
        reloaded = load_dump(path)
        path2 = tmp_path / "again.jsonl"
        save_dump([reloaded.record("a"), reloaded.record("b")], path2)
        assert path2.read_bytes() == first

    def test_float_formatting_is_canonical(self):
        assert format_float(2.0) == "2"
        assert format_float(-0.0) == "0"
        assert format_float(1 / 3) == "0.333333333"
        line = record().to_json_line()
        parsed = json.loads(line)
        assert list(parsed) == ["doc_id", "tokens", "char_spans", "entropy_bits", "logprob_bits"]

    def test_malformed_line_reports_line_number(self, tmp_path):
        path = tmp_path / "dump.jsonl"
        path.write_text(record().to_json_line() + "\n{broken\n", "utf-8")
        with pytest.raises(ParseError, match="line 2"):
            load_dump(path)

    def test_duplicate_doc_id_rejected(self, tmp_path):
        path = tmp_path / "dump.jsonl"
        save_dump([record("same"), record("same")], path)
        with pytest.raises(ValidationError, match="same"):
            load_dump(path)

    def test_header_comments_are_skipped(self, tmp_path):
        path = tmp_path / "dump.jsonl"
        save_dump([record("x")], path, header_comments=["produced-by: test"])
        assert path.read_text("utf-8").startswith("# produced-by: test\n")
        assert load_dump(path).doc_ids() == ["x"]

    def test_invariant_violations_name_the_field(self, tmp_path):
        obj = json.loads(record().to_json_line())
        obj["logprob_bits"] = [0.5, -1.5]
        path = tmp_path / "dump.jsonl"
        path.write_text(json.dumps(obj) + "\n", "utf-8")
        with pytest.raises(ValidationError, match="logprob_bits"):
            load_dump(path)


class TestPrecomputedLM:
    def test_lookup(self):
        lm = PrecomputedLM([record("a"), record("b")])
        assert lm.record("a").doc_id == "a"
        assert "b" in lm and len(lm) == 2

    def test_missing_id_raises(self):
        with pytest.raises(KeyError, match="nope"):
            PrecomputedLM([record("a")]).record("nope")


class _StubHandler(BaseHTTPRequestHandler):
    responses = {}

    def do_POST(self):
        if self.path != "/v1/analyze":
            self.send_error(404)
            return
        length = int(self.headers.get("Content-Length", 0))
        body = json.loads(self.rfile.read(length))
        status, payload = self.server.canned(body["text"])
        data = payload.encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def log_message(self, *args):
        pass


@pytest.fixture
def stub_server():
    def canned(text):
        if text == "boom":
            return 500, json.dumps({"error": "model failure"})
        if text == "garbled":
            return 200, "{not json"
        if text == "mismatched":
            obj = json.loads(record("d").to_json_line())
            obj["entropy_bits"] = obj["entropy_bits"][:1]
            return 200, json.dumps(obj)
        r = DumpRecord(
            doc_id="remote",
            tokens=("hello", "world"),
            char_spans=((0, 5), (6, 11)),
            entropy_bits=(4.0, 3.5),
            logprob_bits=(-2.0, -1.0),
        )
        return 200, r.to_json_line()

    server = HTTPServer(("127.0.0.1", 0), _StubHandler)
    server.canned = canned
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_port}"
    server.shutdown()


class TestFetchRemote:
    def test_round_trip(self, stub_server):
        r = fetch_remote(stub_server, "hello world")
        assert len(r.tokens) >= 2
        assert r.char_spans[0] == (0, 5)

    def test_empty_text_is_client_error(self):
        with pytest.raises(ValueError):
            fetch_remote("http://127.0.0.1:1", "")

    def test_server_error_status(self, stub_server):
        with pytest.raises(RemoteStatusError) as exc:
            fetch_remote(stub_server, "boom")
        assert exc.value.status == 500

    def test_schema_violation(self, stub_server):
        with pytest.raises(RemoteSchemaError):
            fetch_remote(stub_server, "mismatched")

    def test_garbled_body(self, stub_server):
        with pytest.raises(RemoteSchemaError):
            fetch_remote(stub_server, "garbled")

    def test_unreachable_endpoint(self):
        with pytest.raises(RemoteNetworkError):
            fetch_remote("http://127.0.0.1:9", "hi", timeout=0.5)
