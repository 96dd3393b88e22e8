// API payload shapes, mirroring the board service's JSON documents.

export type Category = "subject matter" | "action & pose" | "theme & mood" | "arrangement";

export const CATEGORIES: Category[] = [
  "subject matter",
  "action & pose",
  "theme & mood",
  "arrangement",
];

export interface KeywordDto {
  id: string;
  category: Category;
  text: string;
  source: "extracted" | "recommended" | "manual";
  source_image: string | null;
  arrangement_id: string | null;
}

export interface BBoxDto {
  x: number;
  y: number;
  w: number;
  h: number;
}

export interface ArrangementDto {
  id: string;
  source_image: string;
  canvas_px: number;
  boxes: BBoxDto[];
}

export interface ReferenceDto {
  id: string;
  blob_sha: string;
  keywords: KeywordDto[];
  arrangement: ArrangementDto | null;
  position: [number, number] | null;
  degraded: boolean;
}

export interface DraftObjectDto {
  name: string;
  detail: string;
}

export interface DraftDto {
  id: string;
  caption: string;
  objects: DraftObjectDto[];
  layout: { name: string; box: BBoxDto }[] | null;
  sketches: string[];
  layout_rank_used: number;
  layout_candidates: BBoxDto[][];
  next_rank: number;
  layout_source: string;
}

export interface ActionRecordDto {
  ts_ms: number;
  kind: string;
  digest: string;
}

export interface BoardDto {
  id: string;
  references: ReferenceDto[];
  keywords: KeywordDto[];
  selected_keywords: KeywordDto[];
  drafts: DraftDto[];
  action_log: ActionRecordDto[];
}

export interface ProblemDto {
  type: string;
  title: string;
  detail: string;
  status: number;
}
