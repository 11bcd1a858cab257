//! Arena-backed search tree keyed by action/observation histories.

/// Handle of a node inside a [`SearchTree`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NodeId(u32);

impl NodeId {
    fn index(self) -> usize {
        self.0 as usize
    }
}

/// Visit count and running mean return of one action at one node.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ActionRecord {
    pub visits: u64,
    pub value: f64,
}

impl ActionRecord {
    fn record(&mut self, ret: f64) {
        self.visits += 1;
        self.value += (ret - self.value) / self.visits as f64;
    }
}

#[derive(Debug, Clone)]
pub struct SearchNode<S, O> {
    visits: u64,
    actions: Vec<ActionRecord>,
    children: Vec<Vec<(O, NodeId)>>,
    particles: Vec<S>,
}

impl<S, O: PartialEq> SearchNode<S, O> {
    pub fn new(action_count: usize) -> Self {
        Self {
            visits: 0,
            actions: vec![ActionRecord::default(); action_count],
            children: (0..action_count).map(|_| Vec::new()).collect(),
            particles: Vec::new(),
        }
    }

    /// Build a node with preset statistics; the visit count is the sum of
    /// the per-action visits.
    pub fn with_records(records: Vec<ActionRecord>) -> Self {
        let mut node = Self::new(records.len());
        node.visits = records.iter().map(|r| r.visits).sum();
        node.actions = records;
        node
    }

    pub fn visits(&self) -> u64 {
        self.visits
    }

    pub fn action_count(&self) -> usize {
        self.actions.len()
    }

    pub fn records(&self) -> &[ActionRecord] {
        &self.actions
    }

    pub fn record(&self, action: usize) -> ActionRecord {
        self.actions[action]
    }

    pub fn particles(&self) -> &[S] {
        &self.particles
    }

    pub fn child(&self, action: usize, observation: &O) -> Option<NodeId> {
        self.children[action].iter().find(|(o, _)| o == observation).map(|(_, id)| *id)
    }

    pub fn children(&self, action: usize) -> impl Iterator<Item = &(O, NodeId)> {
        self.children[action].iter()
    }

    pub(crate) fn backup(&mut self, action: usize, ret: f64) {
        self.visits += 1;
        self.actions[action].record(ret);
    }

    pub(crate) fn push_particle(&mut self, state: S) {
        self.particles.push(state);
    }
}

#[derive(Debug, Clone)]
pub struct SearchTree<S, O> {
    nodes: Vec<SearchNode<S, O>>,
    root: NodeId,
}

impl<S, O: PartialEq> SearchTree<S, O> {
    pub fn new(action_count: usize) -> Self {
        Self { nodes: vec![SearchNode::new(action_count)], root: NodeId(0) }
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: NodeId) -> &SearchNode<S, O> {
        &self.nodes[id.index()]
    }

    pub(crate) fn node_mut(&mut self, id: NodeId) -> &mut SearchNode<S, O> {
        &mut self.nodes[id.index()]
    }

    pub(crate) fn add_child(&mut self, parent: NodeId, action: usize, observation: O) -> NodeId {
        let action_count = self.nodes[parent.index()].action_count();
        let id = NodeId(u32::try_from(self.nodes.len()).expect("search tree exceeds u32 nodes"));
        self.nodes.push(SearchNode::new(action_count));
        self.nodes[parent.index()].children[action].push((observation, id));
        id
    }

    /// Make `new_root` the root and drop everything outside its subtree.
    pub(crate) fn rebase(&mut self, new_root: NodeId) {
        let mut old: Vec<Option<SearchNode<S, O>>> = std::mem::take(&mut self.nodes).into_iter().map(Some).collect();
        let mut nodes = Vec::new();
        let mut queue = std::collections::VecDeque::from([(new_root, None::<(usize, usize)>)]);
        while let Some((old_id, slot)) = queue.pop_front() {
            let mut node = old[old_id.index()].take().expect("tree nodes have a single parent");
            let new_id = NodeId(nodes.len() as u32);
            if let Some((parent, pos)) = slot {
                let parent: &mut SearchNode<S, O> = &mut nodes[parent];
                parent.children.iter_mut().flatten().nth(pos).expect("child slot").1 = new_id;
            }
            let mut pos = 0;
            for list in &mut node.children {
                for (_, child) in list.iter() {
                    queue.push_back((*child, Some((new_id.index(), pos))));
                    pos += 1;
                }
            }
            nodes.push(node);
        }
        self.nodes = nodes;
        self.root = NodeId(0);
    }
}
