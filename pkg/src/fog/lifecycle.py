"""Model registry and stage state machine with privacy taint propagation.

Weights trained on private data are treated as private to that domain and may
only be deployed inside it (strictest consistent policy; disable with
`enforce_taint=False` on the registry). Capacity accounting is additive per
node with no eviction: deploy fails when full.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional, Sequence

from .capsule import DataCapsule, placement_allowed
from .errors import (
    CapacityExceeded,
    DuplicateModel,
    MixedDomain,
    NodeIsRobot,
    PrivacyViolation,
    StageError,
)
from .simcore import Dist
from .topology import NodeSpec

TRAINED = "Trained"
ADAPTED = "Adapted"
DEPLOYED = "Deployed"
DEPRECATED = "Deprecated"

TASKS = ("object_recognition", "grasp_planning", "toy_dior")

# Floor for compute-time draws; hundreds of sigma below any calibrated mean,
# keeps reported inference times strictly positive.
COMPUTE_MIN_MS = 0.1


@dataclass(frozen=True)
class Taint:
    """Privacy label of model weights: public, or private to one domain."""

    domain: Optional[int] = None  # None = public

    @property
    def is_private(self) -> bool:
        return self.domain is not None

    def join(self, other: "Taint") -> "Taint":
        """Private absorbs public; two different private domains conflict."""
        if not self.is_private:
            return other
        if not other.is_private:
            return self
        if self.domain != other.domain:
            raise MixedDomain(f"domains {self.domain} and {other.domain} conflict")
        return self

    def to_json(self):
        return "public" if not self.is_private else {"private": self.domain}

    @classmethod
    def from_json(cls, obj) -> "Taint":
        if obj == "public":
            return cls(None)
        if isinstance(obj, dict) and "private" in obj:
            return cls(int(obj["private"]))
        raise ValueError(f"bad taint value: {obj!r}")


PUBLIC_TAINT = Taint(None)


def taint_of(capsules: Sequence[DataCapsule]) -> Taint:
    """Join of the capsules' privacy labels; MixedDomain if two private
    capsules disagree on their home domain."""
    taint = PUBLIC_TAINT
    for c in capsules:
        if c.is_private():
            taint = taint.join(Taint(c.home_domain))
    return taint


@dataclass(frozen=True)
class WorkloadProfile:
    task: str
    request_bytes: int
    response_bytes: int
    compute_ms: dict  # accelerator -> Dist (service time, ms)
    mem_units: int

    def __post_init__(self):
        for acc in ("cpu", "gpu"):
            if acc not in self.compute_ms:
                raise ValueError(f"profile must define compute_ms for {acc}")

    def compute_dist(self, accelerator: str) -> Dist:
        return self.compute_ms[accelerator]


@dataclass(frozen=True)
class ModelArtifact:
    model_id: str
    version: int
    stage: str
    trained_on: tuple[str, ...]  # capsule ids (hex)
    taint: Taint
    profile: WorkloadProfile
    weights_digest: bytes

    def key(self) -> tuple[str, int]:
        return (self.model_id, self.version)


def _digest_for(model_id: str, version: int, capsule_ids: Iterable[str]) -> bytes:
    h = hashlib.sha256()
    h.update(model_id.encode("utf-8"))
    h.update(version.to_bytes(4, "big"))
    for cid in capsule_ids:
        h.update(cid.encode("utf-8"))
    return h.digest()


@dataclass
class Deployment:
    model_id: str
    version: int
    node_id: str
    deployment_id: str


class Registry:
    """Single-owner registry of artifacts and active deployments.

    All mutations are atomic: an operation either fully applies or raises
    without changing state.
    """

    def __init__(self, enforce_taint: bool = True):
        self.enforce_taint = enforce_taint
        self.artifacts: dict[tuple[str, int], ModelArtifact] = {}
        self.deployments: dict[tuple[str, str], Deployment] = {}  # (model_id, node_id)
        self._deploy_counter = 0

    # -- queries ---------------------------------------------------------

    def artifact(self, model_id: str, version: int) -> ModelArtifact:
        return self.artifacts[(model_id, version)]

    def latest_version(self, model_id: str) -> int:
        versions = [v for (m, v) in self.artifacts if m == model_id]
        if not versions:
            raise KeyError(f"no artifact registered for {model_id}")
        return max(versions)

    def active_deployment(self, model_id: str, node_id: str) -> Optional[Deployment]:
        return self.deployments.get((model_id, node_id))

    def node_mem_in_use(self, node_id: str) -> int:
        total = 0
        for dep in self.deployments.values():
            if dep.node_id == node_id:
                total += self.artifacts[(dep.model_id, dep.version)].profile.mem_units
        return total

    # -- operations --------------------------------------------------------

    def register_train(
        self,
        model_id: str,
        capsules: Sequence[DataCapsule],
        node: NodeSpec,
        profile: WorkloadProfile,
    ) -> ModelArtifact:
        """Train from scratch on `node`; all capsules must be allowed there."""
        if (model_id, 1) in self.artifacts:
            raise DuplicateModel(f"{model_id} v1 already registered")
        for c in capsules:
            if not placement_allowed(c, node):
                raise PrivacyViolation(
                    f"capsule {c.capsule_id.hex()} not allowed on node {node.id}"
                )
        taint = taint_of(capsules)
        cap_ids = tuple(c.capsule_id.hex() for c in capsules)
        art = ModelArtifact(
            model_id=model_id,
            version=1,
            stage=TRAINED,
            trained_on=cap_ids,
            taint=taint,
            profile=profile,
            weights_digest=_digest_for(model_id, 1, cap_ids),
        )
        self.artifacts[art.key()] = art
        return art

    def adapt(
        self,
        artifact: ModelArtifact,
        capsules: Sequence[DataCapsule],
        node: NodeSpec,
    ) -> ModelArtifact:
        """New version adapted on additional capsules at `node`; taint is the
        join of the old taint and the capsules' labels."""
        if artifact.key() not in self.artifacts:
            raise KeyError(f"unknown artifact {artifact.key()}")
        artifact = self.artifacts[artifact.key()]
        if artifact.stage not in (TRAINED, ADAPTED, DEPLOYED):
            raise StageError(f"cannot adapt from stage {artifact.stage}")
        for c in capsules:
            if not placement_allowed(c, node):
                raise PrivacyViolation(
                    f"capsule {c.capsule_id.hex()} not allowed on node {node.id}"
                )
        # The artifact's own weights must also be allowed to travel to `node`.
        if self.enforce_taint and artifact.taint.is_private:
            if node.trust_domain != artifact.taint.domain:
                raise PrivacyViolation(
                    f"weights of {artifact.model_id} are private to domain "
                    f"{artifact.taint.domain}; node {node.id} is outside it"
                )
        new_taint = artifact.taint.join(taint_of(capsules))
        version = self.latest_version(artifact.model_id) + 1
        cap_ids = artifact.trained_on + tuple(c.capsule_id.hex() for c in capsules)
        art = ModelArtifact(
            model_id=artifact.model_id,
            version=version,
            stage=ADAPTED,
            trained_on=cap_ids,
            taint=new_taint,
            profile=artifact.profile,
            weights_digest=_digest_for(artifact.model_id, version, cap_ids),
        )
        self.artifacts[art.key()] = art
        return art

    def deploy(self, artifact: ModelArtifact, node: NodeSpec) -> str:
        """Activate `artifact` on `node`; deprecates any prior active version
        of the same model there. Returns the deployment id.

        An artifact already Deployed elsewhere may be deployed to further
        nodes (one model can serve several hosts); Deprecated may not.
        """
        if artifact.key() in self.artifacts:
            artifact = self.artifacts[artifact.key()]
        if artifact.stage not in (TRAINED, ADAPTED, DEPLOYED):
            raise StageError(f"cannot deploy from stage {artifact.stage}")
        if not node.can_host():
            raise NodeIsRobot(f"node {node.id} is a robot and cannot host models")
        if self.enforce_taint and artifact.taint.is_private:
            if node.trust_domain != artifact.taint.domain:
                raise PrivacyViolation(
                    f"{artifact.model_id} v{artifact.version} is private to domain "
                    f"{artifact.taint.domain}; node {node.id} is outside it"
                )
        prior = self.deployments.get((artifact.model_id, node.id))
        in_use = self.node_mem_in_use(node.id)
        if prior is not None:
            in_use -= self.artifacts[(prior.model_id, prior.version)].profile.mem_units
        if in_use + artifact.profile.mem_units > node.mem_capacity:
            raise CapacityExceeded(
                f"node {node.id}: {in_use} + {artifact.profile.mem_units} units "
                f"exceeds capacity {node.mem_capacity}"
            )
        if prior is not None:
            old_art = self.artifacts[(prior.model_id, prior.version)]
            self.artifacts[old_art.key()] = replace(old_art, stage=DEPRECATED)
        self._deploy_counter += 1
        dep_id = f"dep-{self._deploy_counter:06d}"
        self.deployments[(artifact.model_id, node.id)] = Deployment(
            model_id=artifact.model_id,
            version=artifact.version,
            node_id=node.id,
            deployment_id=dep_id,
        )
        self.artifacts[artifact.key()] = replace(artifact, stage=DEPLOYED)
        return dep_id


# --- model manifest (consumed by `fog serve --models manifest.json`) ---------

def profile_from_json(obj: dict) -> WorkloadProfile:
    compute = {}
    for acc in ("cpu", "gpu"):
        spec = obj["compute_ms"][acc]
        compute[acc] = Dist.tnorm(
            spec["mean"], spec["std"], spec.get("min", COMPUTE_MIN_MS)
        )
    return WorkloadProfile(
        task=obj["task"],
        request_bytes=obj["request_bytes"],
        response_bytes=obj["response_bytes"],
        compute_ms=compute,
        mem_units=obj["mem_units"],
    )


def manifest_entry_from_json(obj: dict) -> ModelArtifact:
    profile = profile_from_json(obj)
    model_id = obj["model_id"]
    version = obj.get("version", 1)
    return ModelArtifact(
        model_id=model_id,
        version=version,
        stage=ADAPTED,
        trained_on=tuple(obj.get("trained_on", ())),
        taint=Taint.from_json(obj.get("taint", "public")),
        profile=profile,
        weights_digest=_digest_for(model_id, version, obj.get("trained_on", ())),
    )


def load_manifest(path: str) -> list[ModelArtifact]:
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, list):
        raise ValueError("manifest must be a JSON array of model entries")
    return [manifest_entry_from_json(entry) for entry in data]
