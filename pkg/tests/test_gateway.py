"""Provider gateway: digests, caching, transcripts, rate limiting, stub embeddings."""

import hashlib
import json

import numpy as np
import pytest

from framecheck.gateway import (
    STUB_DIMENSION,
    Gateway,
    GatewayConfigError,
    ProviderConfig,
    ProviderKind,
    RateLimiter,
    Transcript,
    TranscriptMissError,
    TransportError,
    VirtualClock,
    cosine,
    request_digest,
    scripted_gateway,
    stub_embed_gateway,
    stub_embedding,
)


def chat_config(**kwargs) -> ProviderConfig:
    base = dict(
        kind=ProviderKind.REMOTE_CHAT, model_name="m1", endpoint="local://test"
    )
    base.update(kwargs)
    return ProviderConfig(**base)


class TestRequestDigest:
    def test_matches_fixed_serialization(self):
        payload = json.dumps(
            {"model": "m1", "prompt": "hi", "params": {"temperature": 0.0}},
            sort_keys=True,
            ensure_ascii=True,
            separators=(",", ":"),
        )
        expected = hashlib.sha256(payload.encode("utf-8")).hexdigest()
        assert request_digest("m1", "hi", {"temperature": 0.0}) == expected

    def test_param_order_does_not_matter(self):
        a = request_digest("m", "p", {"temperature": 0.0, "top_p": 1.0})
        b = request_digest("m", "p", {"top_p": 1.0, "temperature": 0.0})
        assert a == b

    def test_distinct_requests_get_distinct_digests(self):
        assert request_digest("m", "p1") != request_digest("m", "p2")
        assert request_digest("m1", "p") != request_digest("m2", "p")

    def test_empty_params_equals_missing_params(self):
        assert request_digest("m", "p") == request_digest("m", "p", {})


class TestProviderConfig:
    def test_scripted_requires_transcript(self):
        with pytest.raises(GatewayConfigError):
            ProviderConfig(kind=ProviderKind.SCRIPTED_REPLAY, model_name="m")

    def test_remote_chat_requires_endpoint(self):
        with pytest.raises(GatewayConfigError):
            ProviderConfig(kind=ProviderKind.REMOTE_CHAT, model_name="m")


class TestCompletionCache:
    def test_repeat_prompt_hits_network_once(self):
        calls = []

        def transport(config, prompt, params):
            calls.append(prompt)
            return f"echo:{prompt}"

        gw = Gateway(chat_config(), transport=transport)
        assert gw.complete("hello") == "echo:hello"
        assert gw.complete("hello") == "echo:hello"
        assert calls == ["hello"]

    def test_disk_cache_survives_new_gateway(self, tmp_path):
        calls = []

        def transport(config, prompt, params):
            calls.append(prompt)
            return "resp"

        cfg = chat_config(cache_dir=str(tmp_path / "cache"))
        Gateway(cfg, transport=transport).complete("q")
        assert Gateway(cfg, transport=transport).complete("q") == "resp"
        assert calls == ["q"]

    def test_wrong_kind_cannot_complete(self):
        gw = stub_embed_gateway()
        with pytest.raises(GatewayConfigError):
            gw.complete("hello")

    def test_transport_errors_exhaust_retries(self):
        def transport(config, prompt, params):
            raise ConnectionError("down")

        gw = Gateway(chat_config(max_retries=2), transport=transport, clock=VirtualClock())
        with pytest.raises(TransportError):
            gw.complete("q")


class TestRecordAndReplay:
    def test_recorded_transcript_replays_identically(self, tmp_path):
        path = tmp_path / "t.json"
        recorder = Gateway(
            chat_config(), transport=lambda c, p, _: p.upper(), record_to=path
        )
        live = [recorder.complete(p) for p in ("alpha", "beta")]

        replay = scripted_gateway(path)
        assert replay.config.model_name == "m1"  # model taken from metadata
        assert [replay.complete(p) for p in ("alpha", "beta")] == live

    def test_unknown_prompt_raises_miss(self, tmp_path):
        path = tmp_path / "t.json"
        Gateway(chat_config(), transport=lambda c, p, _: "ok", record_to=path).complete("a")
        with pytest.raises(TranscriptMissError):
            scripted_gateway(path).complete("never recorded")

    def test_transcript_load_keys_by_digest(self, tmp_path):
        path = tmp_path / "t.json"
        path.write_text(
            json.dumps(
                {
                    "metadata": {"model": "m1"},
                    "entries": [
                        {"prompt": "p", "params": {"temperature": 0.0}, "response": "r"}
                    ],
                }
            )
        )
        transcript = Transcript.load(path)
        digest = request_digest("m1", "p", {"temperature": 0.0})
        assert transcript.entries == {digest: "r"}

    def test_digest_for_matches_complete(self, tmp_path):
        path = tmp_path / "t.json"
        gw = Gateway(chat_config(), transport=lambda c, p, _: "ok", record_to=path)
        gw.complete("a")
        recorded = json.loads(path.read_text())["entries"][0]
        assert request_digest(
            recorded["model"], recorded["prompt"], recorded["params"]
        ) == gw.digest_for("a")


class TestRateLimiter:
    def test_sliding_window_spaces_bursts(self):
        clock = VirtualClock()
        limiter = RateLimiter(rate=2, clock=clock)
        for _ in range(2):
            limiter.acquire()
        assert clock.now == 0.0
        limiter.acquire()  # third call must wait out the window
        assert clock.now == pytest.approx(1.0)

    def test_zero_rate_disables_limiting(self):
        clock = VirtualClock()
        limiter = RateLimiter(rate=0, clock=clock)
        for _ in range(100):
            limiter.acquire()
        assert clock.now == 0.0


class TestStubEmbedding:
    def test_dimension_and_unit_norm(self):
        vec = stub_embedding("life expectancy by country")
        assert vec.shape == (STUB_DIMENSION,)
        assert np.linalg.norm(vec) == pytest.approx(1.0)

    def test_bucket_formula(self):
        token = "life"
        bucket = int.from_bytes(
            hashlib.sha256(token.encode("utf-8")).digest()[:8], "big"
        ) % STUB_DIMENSION
        vec = stub_embedding(token)
        assert vec[bucket] == pytest.approx(1.0)

    def test_case_and_punctuation_insensitive(self):
        a = stub_embedding("Life, Expectancy!")
        b = stub_embedding("life expectancy")
        assert np.allclose(a, b)

    def test_token_free_text_is_zero_vector(self):
        assert np.allclose(stub_embedding("!!! ..."), 0.0)

    def test_gateway_embed_is_deterministic(self):
        gw = stub_embed_gateway()
        a, b = gw.embed(["same text", "same text"])
        assert np.allclose(a, b)

    def test_cosine_bounds(self):
        a = stub_embedding("life expectancy")
        b = stub_embedding("average wages")
        assert cosine(a, a) == pytest.approx(1.0)
        assert -1.0 <= cosine(a, b) <= 1.0
        assert cosine(a, np.zeros(STUB_DIMENSION)) == 0.0
