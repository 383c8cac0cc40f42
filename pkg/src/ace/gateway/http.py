"""HTTP backend speaking the OpenAI-compatible wire protocol.

Endpoints: POST {base_url}/v1/chat/completions, POST {base_url}/v1/embeddings,
and a configurable rerank path taking {"model", "query", "documents"} and
returning per-document scores. Any local inference server exposing these
routes can stand in for the reference checkpoints.
"""

from __future__ import annotations

import httpx
import numpy as np

from ace.errors import BackendError, CapabilityMissingError, GatewayTimeout, TransportError
from ace.gateway.types import BackendProfile, ChatRequest


class HttpBackend:
    def __init__(self, profile: BackendProfile):
        self.profile = profile
        headers = {"Content-Type": "application/json"}
        if profile.api_key:
            headers["Authorization"] = f"Bearer {profile.api_key}"
        headers.update(profile.extra_headers)
        self._client = httpx.Client(
            base_url=profile.base_url,
            headers=headers,
            timeout=profile.timeout,
        )

    def close(self) -> None:
        self._client.close()

    def _post(self, path: str, payload: dict) -> dict:
        try:
            response = self._client.post(path, json=payload)
        except httpx.TimeoutException as exc:
            raise GatewayTimeout(f"backend timed out on {path}: {exc}") from exc
        except httpx.HTTPError as exc:
            raise TransportError(f"transport failure on {path}: {exc}") from exc
        if response.status_code < 200 or response.status_code >= 300:
            raise BackendError(
                f"backend returned {response.status_code} on {path}: {response.text[:500]}",
                status=response.status_code,
            )
        try:
            return response.json()
        except ValueError as exc:
            raise BackendError(f"backend returned non-JSON body on {path}") from exc

    def chat(self, request: ChatRequest) -> str:
        payload = {
            "model": request.model,
            "messages": [
                {"role": m.role.value, "content": m.content} for m in request.messages
            ],
            "temperature": request.temperature,
            "max_tokens": request.max_tokens,
        }
        data = self._post("/v1/chat/completions", payload)
        try:
            return data["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError) as exc:
            raise BackendError("chat response missing choices[0].message.content") from exc

    def embed(self, texts: list[str]) -> list[np.ndarray]:
        payload = {"model": self.profile.embed_model, "input": texts}
        data = self._post("/v1/embeddings", payload)
        try:
            rows = sorted(data["data"], key=lambda r: r["index"])
            return [np.asarray(r["embedding"], dtype=np.float32) for r in rows]
        except (KeyError, TypeError) as exc:
            raise BackendError("embeddings response missing data[].embedding") from exc

    def rerank(self, query: str, passages: list[str]) -> list[float]:
        if not self.profile.rerank_model:
            raise CapabilityMissingError("no rerank_model configured for this backend")
        payload = {
            "model": self.profile.rerank_model,
            "query": query,
            "documents": passages,
        }
        data = self._post(self.profile.rerank_path, payload)
        # Accept either {"results": [{"index", "relevance_score"}]} or {"scores": [...]}.
        if "scores" in data:
            return [float(s) for s in data["scores"]]
        try:
            results = sorted(data["results"], key=lambda r: r["index"])
            return [float(r["relevance_score"]) for r in results]
        except (KeyError, TypeError) as exc:
            raise BackendError("rerank response missing scores") from exc
