export type StageKey = 'logline' | 'characters' | 'plots' | 'scenes' | 'dialogues';

export const STAGES: StageKey[] = ['logline', 'characters', 'plots', 'scenes', 'dialogues'];

export type StageState = 'empty' | 'draft' | 'confirmed';
export type StalenessFlag = 'empty' | 'fresh' | 'stale';

export interface Relationship {
  character_id: string;
  description: string;
}

export interface Character {
  id: string;
  name: string;
  personality: string;
  background: string;
  relationships: Relationship[];
}

export interface Plot {
  id: string;
  ordinal: number;
  title: string;
  summary: string;
  cause_ids: string[];
  involved_character_ids: string[];
}

export interface Scene {
  id: string;
  ordinal: number;
  setting: string;
  time: string;
  plot_ids: string[];
  participant_ids: string[];
}

export interface DialogueLine {
  id: string;
  ordinal: number;
  scene_id: string;
  speaker_id: string;
  line: string;
  note: string | null;
}

export type StageElement = Character | Plot | Scene | DialogueLine;

export interface Project {
  id: string;
  title: string;
  logline: { text: string; confirmed_at: string | null };
  characters: Character[];
  plots: Plot[];
  scenes: Scene[];
  dialogues: DialogueLine[];
  stage_status: Record<StageKey, { state: StageState; upstream_fingerprint: string | null }>;
  revision: number;
  revision_log: RevisionEntry[];
  element_seq: number;
}

export interface RevisionEntry {
  revision: number;
  timestamp: string;
  actor: 'user' | 'agent';
  stage: StageKey;
  kind: string;
  before_text: string | null;
  after_text: string | null;
}

export interface ProjectSummary {
  id: string;
  title: string;
  revision: number;
  stages: Record<StageKey, StageState>;
}

export interface DiffReport {
  stage: StageKey;
  absolute_distance: number;
  normalized_distance: number;
  deleted_length: number;
  inserted_length: number;
  jaccard: number;
  base_text: string;
  current_text: string;
}

export interface TutorTurn {
  role: 'user' | 'tutor';
  text: string;
  timestamp: string;
}

export interface TutorResponse {
  reply: string;
  session: { project_id: string; stage: StageKey; messages: TutorTurn[] };
}

export type Staleness = Record<StageKey, StalenessFlag>;
