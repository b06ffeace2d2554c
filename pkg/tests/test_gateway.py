"""Gateway tests: scripted determinism, retry behavior, credential hygiene."""

from __future__ import annotations

import json
import logging

import httpx
import pytest

from pulsechat import gateway
from pulsechat.gateway import (
    EmptyCompletion,
    GenerationParams,
    GenerationRequest,
    HttpProvider,
    ProviderConfig,
    ProviderRejected,
    ProviderUnavailable,
    RetryPolicy,
    ScriptedProvider,
    ScriptExhausted,
    next_scripted_reply,
    provider_from_env,
)


def _request(**overrides) -> GenerationRequest:
    fields = {
        "system_text": "be helpful",
        "history": (("assistant", "hi"), ("participant", "hello")),
        "directive_text": None,
        "params": GenerationParams(timeout_s=0.05),
    }
    fields.update(overrides)
    return GenerationRequest(**fields)


class TestScripted:
    def test_next_scripted_reply_advances(self):
        assert next_scripted_reply(["hi", "ok"], 0) == ("hi", 1)
        assert next_scripted_reply(["hi", "ok"], 1) == ("ok", 2)

    def test_next_scripted_reply_exhaustion(self):
        with pytest.raises(ScriptExhausted):
            next_scripted_reply(["hi", "ok"], 2)

    def test_provider_returns_entries_verbatim(self):
        provider = ScriptedProvider(["one", "two", "three"])
        assert provider.generate(_request()) == "one"
        assert provider.generate(_request()) == "two"
        assert provider.generate(_request()) == "three"

    def test_script_entry_three(self):
        provider = ScriptedProvider(["a", "b", "c", "entry three"])
        for _ in range(3):
            provider.generate(_request())
        assert provider.generate(_request()) == "entry three"

    def test_empty_scripted_reply_is_empty_completion(self):
        provider = ScriptedProvider(["   "])
        with pytest.raises(EmptyCompletion):
            provider.generate(_request())

    def test_from_file(self, tmp_path):
        path = tmp_path / "script.json"
        path.write_text(json.dumps(["alpha", "beta"]), encoding="utf-8")
        provider = ScriptedProvider.from_file(path)
        assert provider.generate(_request()) == "alpha"

    def test_from_file_rejects_non_list(self, tmp_path):
        path = tmp_path / "script.json"
        path.write_text(json.dumps({"not": "a list"}), encoding="utf-8")
        with pytest.raises(ValueError):
            ScriptedProvider.from_file(path)


class TestRequestValidation:
    def test_consecutive_participant_entries_rejected(self):
        with pytest.raises(ValueError):
            _request(history=(("participant", "a"), ("participant", "b")))

    def test_consecutive_assistant_entries_allowed(self):
        request = _request(history=(("assistant", "a"), ("assistant", "b")))
        assert len(request.history) == 2

    def test_unknown_author_rejected(self):
        with pytest.raises(ValueError):
            _request(history=(("system", "a"),))

    def test_temperature_range(self):
        with pytest.raises(ValueError):
            GenerationParams(temperature=2.5)

    def test_max_tokens_positive(self):
        with pytest.raises(ValueError):
            GenerationParams(max_output_tokens=0)

    def test_retry_policy_attempts(self):
        with pytest.raises(ValueError):
            RetryPolicy(max_attempts=0)


def _http_provider(handler, max_attempts=3) -> HttpProvider:
    config = ProviderConfig(
        base_url="https://llm.test/v1",
        model_name="test-model",
        api_key="secret-credential-42",
        retry=RetryPolicy(max_attempts=max_attempts, backoff_s=0.001),
    )
    return HttpProvider(config, transport=httpx.MockTransport(handler), sleep=lambda _s: None)


def _completion(text: str) -> httpx.Response:
    return httpx.Response(200, json={"choices": [{"message": {"content": text}}]})


class TestHttpProvider:
    def test_success_request_shape(self):
        seen = {}

        def handler(request: httpx.Request) -> httpx.Response:
            seen["body"] = json.loads(request.content)
            seen["auth"] = request.headers.get("authorization")
            seen["url"] = str(request.url)
            return _completion("hello there")

        provider = _http_provider(handler)
        reply = provider.generate(_request(directive_text="be gentle"))
        assert reply == "hello there"
        assert seen["url"].endswith("/chat/completions")
        assert seen["auth"] == "Bearer secret-credential-42"
        roles = [m["role"] for m in seen["body"]["messages"]]
        assert roles == ["system", "assistant", "user", "system"]
        assert seen["body"]["model"] == "test-model"

    def test_two_transient_failures_then_success(self):
        calls = {"n": 0}

        def handler(request: httpx.Request) -> httpx.Response:
            calls["n"] += 1
            if calls["n"] <= 2:
                return httpx.Response(502, text="bad gateway")
            return _completion("recovered")

        provider = _http_provider(handler, max_attempts=3)
        assert provider.generate(_request()) == "recovered"
        assert calls["n"] == 3

    def test_client_error_no_retry(self):
        calls = {"n": 0}

        def handler(request: httpx.Request) -> httpx.Response:
            calls["n"] += 1
            return httpx.Response(404, text="nope")

        provider = _http_provider(handler)
        with pytest.raises(ProviderRejected):
            provider.generate(_request())
        assert calls["n"] == 1

    def test_all_failures_exhausted(self):
        def handler(request: httpx.Request) -> httpx.Response:
            return httpx.Response(500, text="down")

        provider = _http_provider(handler, max_attempts=2)
        with pytest.raises(ProviderUnavailable):
            provider.generate(_request())

    def test_connection_errors_retry_then_fail(self):
        def handler(request: httpx.Request) -> httpx.Response:
            raise httpx.ConnectError("refused")

        provider = _http_provider(handler, max_attempts=2)
        with pytest.raises(ProviderUnavailable):
            provider.generate(_request())

    def test_empty_completion_detected(self):
        provider = _http_provider(lambda request: _completion("   "))
        with pytest.raises(EmptyCompletion):
            provider.generate(_request())

    def test_malformed_body_detected(self):
        provider = _http_provider(lambda request: httpx.Response(200, json={"odd": True}))
        with pytest.raises(EmptyCompletion):
            provider.generate(_request())

    def test_credential_never_in_errors_or_logs(self, caplog):
        def handler(request: httpx.Request) -> httpx.Response:
            return httpx.Response(500, text="down")

        provider = _http_provider(handler, max_attempts=2)
        with caplog.at_level(logging.DEBUG):
            with pytest.raises(ProviderUnavailable) as excinfo:
                provider.generate(_request())
        assert "secret-credential-42" not in str(excinfo.value)
        assert "secret-credential-42" not in caplog.text


class TestProviderFromEnv:
    def test_scripted_selected(self, tmp_path):
        script = tmp_path / "script.json"
        script.write_text(json.dumps(["canned"]), encoding="utf-8")
        provider = provider_from_env(
            {"PULSECHAT_LLM_PROVIDER": "scripted", "PULSECHAT_SCRIPT_FILE": str(script)}
        )
        assert isinstance(provider, ScriptedProvider)

    def test_scripted_requires_file(self):
        with pytest.raises(ValueError):
            provider_from_env({"PULSECHAT_LLM_PROVIDER": "scripted"})

    def test_http_requires_base_url_and_model(self):
        with pytest.raises(ValueError):
            provider_from_env({"PULSECHAT_LLM_PROVIDER": "http"})

    def test_http_built(self):
        provider = provider_from_env(
            {
                "PULSECHAT_LLM_BASE_URL": "https://llm.test/v1",
                "PULSECHAT_LLM_MODEL": "m",
                "PULSECHAT_LLM_API_KEY": "k",
            }
        )
        assert isinstance(provider, HttpProvider)

    def test_timeout_env(self):
        assert gateway.default_timeout_s({"PULSECHAT_LLM_TIMEOUT_MS": "1500"}) == 1.5
