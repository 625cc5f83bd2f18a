// JSON shapes returned by the backend API (field names mirror the domain types).

export interface FrameInfo {
  name: string;
  definition: string;
  core_fes: string[];
  noncore_fes: string[];
}

export interface FeInfo {
  name: string;
  frame: string;
  coreness: "core" | "noncore";
}

export interface LuInfo {
  id: string;
  name: string;
  frame: string;
  language: string;
}

export type Box = [number, number, number, number]; // xmin, ymin, xmax, ymax

export interface SegmentInfo {
  start: number;
  end: number;
  keyframes: Record<string, Box>;
}

export interface ObjectInfo {
  id: number;
  origin: string;
  state: "tracking" | "paused" | "ended";
  entity_type: string;
  cv_suggestion: string | null;
  segments: SegmentInfo[];
  labels: Record<string, string>;
}

export interface SentenceInfo {
  id: number;
  text: string;
  start_ms: number;
  end_ms: number;
}

export interface LayerLabelInfo {
  start: number;
  end: number;
  label: string;
}

export interface AnnotationSetInfo {
  id: number;
  sentence_ref: number;
  target_start: number;
  target_end: number;
  frame: string;
  layers: Record<string, LayerLabelInfo[]>;
  ni: { fe: string; type: string }[];
}

export interface ObjectAnnotationInfo {
  id: number;
  object_ref: number;
  frame: string;
  fe: string;
  cv_name: string | null;
  provenance: string;
}

export interface CorrelationInfo {
  object_ref: number;
  sentence_ref: number;
  start: number;
  end: number;
}

export interface WordInfo {
  text: string;
  start_ms: number;
  end_ms: number;
  source: string;
}

export interface DraftInfo {
  id: number;
  status: "auto" | "human_edited" | "finalized";
  text: string;
  start_ms: number;
  end_ms: number;
  words: WordInfo[];
}

export interface DetectionInfo {
  det_id: number;
  frame_index: number;
  box: Box;
  class_label: string;
  confidence: number;
  consumed: boolean;
  cv_suggestion: string | null;
}

export interface CandidateInfo {
  sentence_ref: number;
  start: number;
  end: number;
  lemma: string;
  pos: string;
  frames: string[];
  chosen: string | null;
  score: number | null;
  provenance: string;
}

export interface DocumentView {
  doc_id: string;
  mode: "static" | "video";
  media: string;
  width: number | null;
  height: number | null;
  fps: number | null;
  frame_count: number | null;
  revisions: Record<string, number>;
  sentences: SentenceInfo[];
  objects: ObjectInfo[];
  annotation_sets: AnnotationSetInfo[];
  object_annotations: ObjectAnnotationInfo[];
  correlations: CorrelationInfo[];
  drafts: DraftInfo[];
  detections: DetectionInfo[];
  candidates: CandidateInfo[];
}

export interface BoxAtFrame {
  object_id: number;
  box: Box;
}
