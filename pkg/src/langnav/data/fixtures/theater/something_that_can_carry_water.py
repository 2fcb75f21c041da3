def execute_command(image):
    image_patch = ImagePatch(image)
    candidate_patches = []
    for name in ['bucket', 'cup', 'bottle']:
        found = image_patch.find(name)
        for patch in found:
            candidate_patches.append(patch)
    if len(candidate_patches) == 0:
        return {'function': 'None', 'error': 'Nothing that can carry water found.'}
    target = candidate_patches[0]
    inputs = (target.horizontal_center, target.vertical_center)
    return {'function': 'navigate_to_object', 'inputs': inputs, 'box': [target.left, target.lower, target.right, target.upper]}
