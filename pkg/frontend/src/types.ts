export interface Point {
  x: number;
  y: number;
}

export interface Box {
  x: number;
  y: number;
  w: number;
  h: number;
}

export interface AnnotationRecord {
  id: string;
  frame: string;
  label: string;
  box: Box;
  visible: Box | null;
  ignore: boolean;
  source: string;
}

export interface FrameInfo {
  id: string;
  revision: number;
  annotations: number;
}

export interface DiffBox {
  id: string;
  label: string;
  box: Box;
  ignore: boolean;
}

export interface DiffPayload {
  frame: string;
  matched: { original: DiffBox; new: DiffBox; iou: number }[];
  original_only: DiffBox[];
  new_only: DiffBox[];
  agreement: number;
  original_ignores: DiffBox[];
  new_ignores: DiffBox[];
}
