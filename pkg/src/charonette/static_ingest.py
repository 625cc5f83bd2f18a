"""Picture-caption corpus bundles.

A bundle is a ZIP archive with three parts: ``images/*.jpg``,
``sentences.txt`` (one caption per line, UTF-8, LF) and ``boxes.xml``.
Captions may wrap entity phrases in coreference-chain markup of the form
``[/EN#<id>/<type> <phrase>]`` (non-nested). The box XML groups objects per
image; each object carries one or more entity ids (``name``), an optional
``class`` label and a ``bndbox`` with inclusive pixel coordinates, which are
converted to the half-open convention at parse time.

Captions pair with images positionally: with N images (name-sorted) and M
captions, M must be k*N for integer k, and each image takes k consecutive
caption lines. One document is built per (image, caption) pair.
"""

from __future__ import annotations

import io
import zipfile
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field

from PIL import Image

from .errors import CharonetteError
from .geometry import BoxGeometry


class BundleError(CharonetteError):
    code = "bundle_invalid"
    status = 400


class ChainMarkupError(CharonetteError):
    code = "chain_markup"
    status = 422


@dataclass(frozen=True)
class ImageInfo:
    file_name: str
    width: int
    height: int


@dataclass(frozen=True)
class BoundingBox:
    box: BoxGeometry
    image_ref: str
    entity_id: int
    class_label: str = ""


@dataclass(frozen=True)
class PhraseSpan:
    sentence_index: int
    start: int
    end: int


@dataclass
class EntityChain:
    """Joins the caption phrase(s) and box(es) that share one entity id."""

    entity_id: int
    entity_type: str
    phrase_spans: list[PhraseSpan] = field(default_factory=list)
    boxes: list[BoundingBox] = field(default_factory=list)

    @property
    def is_linked(self) -> bool:
        return bool(self.phrase_spans) and bool(self.boxes)

    @property
    def linkage(self) -> str:
        if self.is_linked:
            return "linked"
        return "phrase_only" if self.phrase_spans else "box_only"


@dataclass
class CorpusDocument:
    doc_id: str
    image_ref: str
    sentence: str  # caption with chain markup stripped
    chains: list[EntityChain]
    source_corpus: str


@dataclass
class CorpusBundle:
    name: str
    images: list[ImageInfo]
    sentences_raw: list[str]
    boxes_raw: list[BoundingBox]


# -- caption chain markup -----------------------------------------------------

_OPEN = "[/EN#"


def parse_caption_chains(raw_caption: str) -> tuple[str, list[tuple[int, str, tuple[int, int]]]]:
    """Strip chain markup from a caption.

    Returns the plain sentence and one (entity_id, entity_type, (start, end))
    triple per chain occurrence; spans index the plain sentence.
    """
    plain: list[str] = []
    spans: list[tuple[int, str, tuple[int, int]]] = []
    pos = 0
    length = 0  # chars emitted so far
    n = len(raw_caption)
    while pos < n:
        if raw_caption.startswith(_OPEN, pos):
            head_end = raw_caption.find(" ", pos)
            close = raw_caption.find("]", pos)
            if close == -1:
                raise ChainMarkupError(f"unbalanced chain markup at position {pos}")
            if head_end == -1 or head_end > close:
                raise ChainMarkupError(f"chain markup without phrase at position {pos}")
            head = raw_caption[pos + len(_OPEN):head_end]
            id_part, _, type_part = head.partition("/")
            if not id_part.isdigit():
                raise ChainMarkupError(f"non-integer entity id {id_part!r} at position {pos}")
            phrase = raw_caption[head_end + 1:close]
            if _OPEN in phrase or "[" in phrase:
                raise ChainMarkupError(f"nested chain markup at position {pos}")
            start = length
            plain.append(phrase)
            length += len(phrase)
            spans.append((int(id_part), type_part, (start, length)))
            pos = close + 1
        else:
            ch = raw_caption[pos]
            if ch == "]":
                raise ChainMarkupError(f"unmatched ']' at position {pos}")
            plain.append(ch)
            length += 1
            pos += 1
    return "".join(plain), spans


# -- bundle reading -----------------------------------------------------------

IMAGE_SUFFIXES = (".jpg", ".jpeg", ".png")


def open_bundle(zip_bytes: bytes, name: str = "bundle") -> CorpusBundle:
    """Unpack and validate a corpus bundle ZIP."""
    try:
        archive = zipfile.ZipFile(io.BytesIO(zip_bytes))
    except zipfile.BadZipFile as exc:
        raise BundleError(f"not a ZIP archive: {exc}") from exc

    names = set(archive.namelist())
    image_names = sorted(
        n for n in names
        if n.startswith("images/") and n.lower().endswith(IMAGE_SUFFIXES)
    )
    if not image_names:
        raise BundleError("images folder not found or empty")
    if "sentences.txt" not in names:
        raise BundleError("sentences file not found")
    if "boxes.xml" not in names:
        raise BundleError("boxes file not found")

    images = []
    for member in image_names:
        file_name = member.split("/", 1)[1]
        try:
            with archive.open(member) as fh:
                width, height = Image.open(fh).size  # header only, no pixel decode
        except Exception as exc:
            raise BundleError(f"unreadable image {file_name!r}: {exc}") from exc
        images.append(ImageInfo(file_name, width, height))

    text = archive.read("sentences.txt").decode("utf-8")
    sentences_raw = [line for line in text.split("\n") if line.strip()]

    dims = {img.file_name: (img.width, img.height) for img in images}
    boxes_raw = _parse_boxes_xml(archive.read("boxes.xml"), dims)
    return CorpusBundle(name=name, images=images, sentences_raw=sentences_raw, boxes_raw=boxes_raw)


def _parse_boxes_xml(data: bytes, dims: dict[str, tuple[int, int]]) -> list[BoundingBox]:
    try:
        root = ET.fromstring(data)
    except ET.ParseError as exc:
        raise BundleError(f"boxes.xml is not well-formed: {exc}") from exc

    boxes: list[BoundingBox] = []
    for image_el in root.findall("image"):
        image_ref = image_el.get("name", "")
        if image_ref not in dims:
            raise BundleError(f"boxes.xml references unknown image {image_ref!r}")
        width, height = dims[image_ref]
        for obj in image_el.findall("object"):
            entity_ids = [el.text or "" for el in obj.findall("name")]
            class_label = (obj.findtext("class") or "").strip()
            bnd = obj.find("bndbox")
            if bnd is None or not entity_ids:
                raise BundleError(f"malformed box record for image {image_ref!r}")
            try:
                xmin = int(bnd.findtext("xmin"))
                ymin = int(bnd.findtext("ymin"))
                xmax = int(bnd.findtext("xmax")) + 1  # inclusive -> half-open
                ymax = int(bnd.findtext("ymax")) + 1
            except (TypeError, ValueError) as exc:
                raise BundleError(f"malformed box coordinates for image {image_ref!r}") from exc
            geometry = BoxGeometry(xmin, ymin, xmax, ymax)
            if not geometry.well_formed(width, height):
                raise BundleError(
                    f"box {geometry} out of bounds for image {image_ref!r} ({width}x{height})"
                )
            for raw_id in entity_ids:
                if not raw_id.strip().isdigit():
                    raise BundleError(f"non-integer entity id {raw_id!r} in boxes.xml")
                boxes.append(BoundingBox(geometry, image_ref, int(raw_id), class_label))
    return boxes


# -- linking -------------------------------------------------------------------


def link_entities(bundle: CorpusBundle) -> list[CorpusDocument]:
    """Build one document per (image, caption) pair, joining caption phrase
    spans and boxes that share an entity id.

    Chains with only one side (phrase or box) are retained and flagged via
    EntityChain.linkage rather than rejected.
    """
    n_images = len(bundle.images)
    n_sentences = len(bundle.sentences_raw)
    if n_images == 0 or n_sentences % n_images != 0:
        raise BundleError(
            f"cannot pair {n_sentences} captions with {n_images} images"
        )
    per_image = n_sentences // n_images

    boxes_by_image: dict[str, list[BoundingBox]] = {}
    for box in bundle.boxes_raw:
        boxes_by_image.setdefault(box.image_ref, []).append(box)

    documents = []
    for img_index, image in enumerate(bundle.images):
        image_boxes = boxes_by_image.get(image.file_name, [])
        for k in range(per_image):
            raw = bundle.sentences_raw[img_index * per_image + k]
            plain, occurrences = parse_caption_chains(raw)
            chains: dict[int, EntityChain] = {}
            for entity_id, entity_type, (start, end) in occurrences:
                chain = chains.setdefault(entity_id, EntityChain(entity_id, entity_type))
                chain.phrase_spans.append(PhraseSpan(0, start, end))
            for box in image_boxes:
                chain = chains.get(box.entity_id)
                if chain is None:
                    chain = EntityChain(box.entity_id, box.class_label)
                    chains[box.entity_id] = chain
                chain.boxes.append(box)
            stem = image.file_name.rsplit(".", 1)[0]
            documents.append(
                CorpusDocument(
                    doc_id=f"{stem}-{k}",
                    image_ref=image.file_name,
                    sentence=plain,
                    chains=[chains[i] for i in sorted(chains)],
                    source_corpus=bundle.name,
                )
            )
    return documents


# -- bundle writing (round-trip counterpart, used by tests and demo scripts) ---


def write_bundle(bundle: CorpusBundle) -> bytes:
    """Serialize a CorpusBundle back into ZIP bytes.

    Image pixel content is synthesized (flat grey JPEG/PNG of the recorded
    dimensions); open_bundle(write_bundle(b)) == b for a bundle with
    name-sorted images.
    """
    buf = io.BytesIO()
    with zipfile.ZipFile(buf, "w") as archive:
        for img in bundle.images:
            payload = io.BytesIO()
            fmt = "PNG" if img.file_name.lower().endswith(".png") else "JPEG"
            Image.new("RGB", (img.width, img.height), (128, 128, 128)).save(payload, fmt)
            archive.writestr(f"images/{img.file_name}", payload.getvalue())
        archive.writestr("sentences.txt", "\n".join(bundle.sentences_raw) + "\n")
        archive.writestr("boxes.xml", _boxes_to_xml(bundle))
    return buf.getvalue()


def _boxes_to_xml(bundle: CorpusBundle) -> str:
    root = ET.Element("annotations")
    by_image: dict[str, list[BoundingBox]] = {}
    for box in bundle.boxes_raw:
        by_image.setdefault(box.image_ref, []).append(box)
    for img in bundle.images:
        image_el = ET.SubElement(root, "image", name=img.file_name)
        for box in by_image.get(img.file_name, []):
            obj = ET.SubElement(image_el, "object")
            ET.SubElement(obj, "name").text = str(box.entity_id)
            if box.class_label:
                ET.SubElement(obj, "class").text = box.class_label
            bnd = ET.SubElement(obj, "bndbox")
            ET.SubElement(bnd, "xmin").text = str(box.box.xmin)
            ET.SubElement(bnd, "ymin").text = str(box.box.ymin)
            ET.SubElement(bnd, "xmax").text = str(box.box.xmax - 1)  # half-open -> inclusive
            ET.SubElement(bnd, "ymax").text = str(box.box.ymax - 1)
    return ET.tostring(root, encoding="unicode")
