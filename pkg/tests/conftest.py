import pytest

from digestlabels.model import Tvd
from digestlabels.providers import MockCompletionProvider, MockEmbedder, Providers, ProviderScript

# Source texts for the CVE-2012-0045 worked example, one per repository.
FIG1_TEXTS = {
    "CVE": "KVM does not properly handle the 0f05 opcode",
    "IBM": "unable to handle opcode 0f05 correctly",
    "CNNVD": "KVM improperly handles syscall instructions in specific CPU modes on certain CPUs",
    "JVN": "the improper handling of the syscall opcode 0f05 by KVM on specific CPU models",
}

MERGED_ROOT_CAUSE = (
    "KVM does not properly handle the 0f05 (syscall) opcode on specific CPU models and modes."
)

FIG1_ANCHORS = {
    "CVE": "KVM, 0f05, opcode",
    "IBM": "opcode, 0f05",
    "CNNVD": "KVM, syscall instructions, CPU modes, CPUs",
    "JVN": "syscall, opcode, 0f05, KVM, CPU models",
}

RETRIEVED_AT = "2024-01-01T00:00:00Z"


def fig1_tvds():
    return [
        Tvd(cve_id="CVE-2012-0045", repo=repo, text=text, retrieved_at=RETRIEVED_AT)
        for repo, text in FIG1_TEXTS.items()
    ]


def _extraction_response(root_cause):
    return (
        "VulnerabilityType: NONE\n"
        "AttackVector: NONE\n"
        "AttackerType: NONE\n"
        f"RootCause: {root_cause}\n"
        "Impact: NONE\n"
        "Product: KVM\n"
        "Component: NONE\n"
        "Version: NONE"
    )


def fig1_script():
    script = ProviderScript()
    for repo, text in FIG1_TEXTS.items():
        script.add("extract", text, _extraction_response(text))
    for repo, text in FIG1_TEXTS.items():
        script.add("anchors", text, FIG1_ANCHORS[repo])
    script.add("merge", "Based on information entropy", MERGED_ROOT_CAUSE)
    script.add("anchors", MERGED_ROOT_CAUSE, "0f05, syscall, CPU models, modes")
    return script


def fig1_providers():
    return Providers(
        llm=MockCompletionProvider(fig1_script()),
        embedder=MockEmbedder(dimension=32),
    )


@pytest.fixture
def providers():
    return fig1_providers()


@pytest.fixture
def tvds():
    return fig1_tvds()
